#include "slabtune/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "slabtune/error.hpp"
#include "slabtune/experiment.hpp"
#include "slabtune/histogram.hpp"
#include "slabtune/memcached_client.hpp"
#include "slabtune/optimizer.hpp"
#include "slabtune/slab_config.hpp"

namespace slabtune {

namespace {

constexpr const char* kSeedEnv = "SLABTUNE_SEED";

// Raised for flag combinations CLI11 cannot express; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string format = "table";
  Bytes page_size = kDefaultPageSize;
  Bytes min_chunk = kDefaultMinChunk;
  double growth = kDefaultGrowth;
  Bytes align = kDefaultAlign;
  Bytes overhead = 0;

  bool csv() const { return format == "csv"; }
  SlabConfig defaults() const {
    return default_classes(min_chunk, growth, page_size, align);
  }
};

struct SourceFlags {
  std::string trace;
  std::string csv;
  std::string server;
  std::int64_t timeout_ms = 2000;
};

struct SearchFlags {
  std::uint64_t patience = 1000;
  std::uint32_t restarts = 1;
  std::uint64_t max_iterations = 10'000'000;

  OptimizerParams params(std::uint64_t seed) const {
    OptimizerParams p;
    p.patience = patience;
    p.restarts = restarts;
    p.max_iterations = max_iterations;
    p.seed = seed;
    return p;
  }
};

std::uint64_t seed_from_env() {
  const char* value = std::getenv(kSeedEnv);
  if (!value || !*value) return 0;
  std::string_view text(value);
  std::uint64_t seed = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || p != text.data() + text.size())
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: " +
                     value);
  return seed;
}

void add_sources(CLI::App* cmd, SourceFlags& src) {
  auto* trace = cmd->add_option("--trace", src.trace,
                                "Newline-delimited item sizes");
  auto* csv = cmd->add_option("--csv", src.csv, "Histogram CSV (size,count)");
  auto* server = cmd->add_option("--server", src.server,
                                 "Memcached host:port to sample with stats sizes");
  trace->excludes(csv)->excludes(server);
  csv->excludes(server);
  cmd->add_option("--timeout-ms", src.timeout_ms, "Server sampling timeout")
      ->check(CLI::PositiveNumber);
}

void add_search(CLI::App* cmd, SearchFlags& search) {
  cmd->add_option("--patience", search.patience,
                  "Consecutive rejected moves before stopping")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", search.restarts, "Independent climbs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iterations", search.max_iterations,
                  "Per-climb move cap")
      ->check(CLI::PositiveNumber);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

SizeHistogram load_histogram(const SourceFlags& src, const GlobalFlags& global) {
  if (!src.trace.empty()) {
    auto in = open_input(src.trace);
    return histogram_from_trace(in, global.overhead);
  }
  if (!src.csv.empty()) {
    auto in = open_input(src.csv);
    return histogram_from_csv(in);
  }
  if (!src.server.empty()) {
    const auto sample = fetch_stats_sizes(parse_endpoint(src.server),
                                          std::chrono::milliseconds(src.timeout_ms));
    return sample_to_histogram(sample);
  }
  throw UsageError("one of --trace, --csv or --server is required");
}

std::string percent(double value) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << value;
  return s.str();
}

std::string sizes_text(const SlabConfig& config) {
  return join_chunk_sizes(config.chunk_sizes());
}

void print_report(std::ostream& out, const ExperimentReport& r, bool csv,
                  bool header) {
  if (csv) {
    if (header)
      out << "label,old_config,new_config,old_waste,new_waste,"
             "percent_recovered,item_count,seed\n";
    out << r.label << ',' << sizes_text(r.old_config) << ','
        << sizes_text(r.new_config) << ',' << r.old_waste << ',' << r.new_waste
        << ',' << percent(r.percent_recovered) << ',' << r.item_count << ','
        << r.seed << '\n';
    return;
  }
  out << std::left;
  out << std::setw(20) << "workload" << r.label << '\n'
      << std::setw(20) << "items" << r.item_count << '\n'
      << std::setw(20) << "seed" << r.seed << '\n'
      << std::setw(20) << "old config" << sizes_text(r.old_config) << '\n'
      << std::setw(20) << "new config" << sizes_text(r.new_config) << '\n'
      << std::setw(20) << "old waste (bytes)" << r.old_waste << '\n'
      << std::setw(20) << "new waste (bytes)" << r.new_waste << '\n'
      << std::setw(20) << "recovered (%)" << percent(r.percent_recovered) << '\n';
}

int cmd_defaults(const GlobalFlags& global, std::ostream& out) {
  const auto config = global.defaults();
  if (global.csv()) out << "chunk_size\n";
  for (auto c : config.chunk_sizes()) out << c << '\n';
  return kExitOk;
}

int cmd_analyze(const GlobalFlags& global, const SourceFlags& src,
                const std::string& slab_sizes, std::ostream& out,
                std::ostream& err) {
  const auto hist = load_histogram(src, global);
  const SlabBounds bounds{global.page_size, global.min_chunk, global.align};
  const auto config = slab_sizes.empty() ? global.defaults()
                                         : parse_slab_sizes(slab_sizes, bounds);
  if (hist.empty()) err << "warning: histogram is empty\n";
  const auto report = waste(config, hist);

  if (global.csv()) {
    out << "chunk_size,item_count,wasted_bytes\n";
    for (const auto& row : report.per_class)
      if (row.item_count)
        out << row.chunk_size << ',' << row.item_count << ',' << row.wasted_bytes
            << '\n';
    out << "total," << hist.total_items() << ',' << report.wasted_bytes << '\n';
    return kExitOk;
  }
  out << std::left;
  out << std::setw(18) << "items" << hist.total_items() << '\n'
      << std::setw(18) << "used bytes" << report.used_bytes << '\n'
      << std::setw(18) << "wasted bytes" << report.wasted_bytes << '\n'
      << std::setw(18) << "allocated bytes" << report.allocated_bytes << '\n'
      << std::setw(18) << "efficiency (%)" << percent(100.0 * report.efficiency)
      << '\n';
  out << '\n'
      << std::right << std::setw(12) << "chunk_size" << std::setw(14) << "items"
      << std::setw(18) << "wasted_bytes" << '\n';
  for (const auto& row : report.per_class)
    if (row.item_count)
      out << std::setw(12) << row.chunk_size << std::setw(14) << row.item_count
          << std::setw(18) << row.wasted_bytes << '\n';
  return kExitOk;
}

int cmd_optimize(const GlobalFlags& global, const SourceFlags& src,
                 const SearchFlags& search, std::size_t classes, bool align8,
                 std::ostream& out) {
  const auto hist = load_histogram(src, global);
  if (hist.empty()) throw Error("histogram is empty; nothing to optimize");
  auto params = search.params(global.seed);
  if (classes) params.classes = classes;
  const std::string label = !src.trace.empty() ? src.trace
                            : !src.csv.empty() ? src.csv
                                               : src.server;
  const auto report =
      run_experiment(label, hist, global.defaults(), params, align8 ? 8 : 1);
  print_report(out, report, global.csv(), true);
  out << format_slab_sizes(report.new_config) << '\n';
  return kExitOk;
}

std::string case_label(double mean, double sd) {
  std::ostringstream s;
  s << "mean=" << mean << " sd=" << sd;
  return s.str();
}

int cmd_reproduce(const GlobalFlags& global, const SearchFlags& search,
                  int case_id, bool all, Count items, bool log_space,
                  std::ostream& out, std::ostream& err) {
  if (!all && case_id == 0) throw UsageError("give --case N or --all");
  const auto defaults = global.defaults();
  bool first = true;
  if (global.csv())
    out << "case,source,old_config,new_config,old_waste,new_waste,"
           "percent_recovered\n";
  for (const auto& pc : published_cases()) {
    if (!all && pc.id != case_id) continue;
    WorkloadSpec spec{.mean = pc.mean,
                      .sd = pc.sd,
                      .item_count = items,
                      .seed = global.seed,
                      .overhead = global.overhead,
                      .params = log_space ? LogNormalParams::kLogSpace
                                          : LogNormalParams::kArithmetic};
    SizeHistogram hist;
    try {
      hist = generate_lognormal(spec);
    } catch (const ValidationError& e) {
      err << "case " << pc.id << ": " << e.what() << '\n';
      return kExitFailure;
    }
    const auto r = run_experiment(case_label(pc.mean, pc.sd), hist, defaults,
                                  search.params(global.seed));
    const SlabConfig published_old(pc.old_sizes);
    const SlabConfig published_new(pc.new_sizes);

    if (global.csv()) {
      out << pc.id << ",published," << sizes_text(published_old) << ','
          << sizes_text(published_new) << ',' << pc.old_waste << ',' << pc.new_waste
          << ',' << percent(pc.percent_recovered) << '\n';
      out << pc.id << ",measured," << sizes_text(r.old_config) << ','
          << sizes_text(r.new_config) << ',' << r.old_waste << ',' << r.new_waste
          << ',' << percent(r.percent_recovered) << '\n';
      continue;
    }
    if (!first) out << '\n';
    first = false;
    out << "case " << pc.id << ": " << r.label << " items=" << r.item_count
        << " seed=" << r.seed << '\n';
    out << std::left << std::setw(20) << "" << std::setw(36) << "published"
        << "measured" << '\n';
    auto row = [&](const char* name, const std::string& published,
                   const std::string& measured) {
      out << std::setw(20) << name << std::setw(36) << published << measured << '\n';
    };
    row("old config", sizes_text(published_old), sizes_text(r.old_config));
    row("new config", sizes_text(published_new), sizes_text(r.new_config));
    row("old waste (bytes)", std::to_string(pc.old_waste),
        std::to_string(r.old_waste));
    row("new waste (bytes)", std::to_string(pc.new_waste),
        std::to_string(r.new_waste));
    row("recovered (%)", percent(pc.percent_recovered),
        percent(r.percent_recovered));
  }
  return kExitOk;
}

std::vector<double> parse_sigmas(const std::string& text) {
  std::vector<double> sigmas;
  std::stringstream in(text);
  for (std::string token; std::getline(in, token, ',');) {
    if (token.empty()) continue;
    double v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || p != token.data() + token.size() || v < 0)
      throw UsageError("bad sigma value '" + token + "'");
    sigmas.push_back(v);
  }
  if (sigmas.empty()) throw UsageError("--sigmas needs at least one value");
  return sigmas;
}

int cmd_sweep_sigma(const GlobalFlags& global, const SearchFlags& search,
                    double mean, const std::string& sigma_list, Count items,
                    std::ostream& out) {
  const auto sigmas = parse_sigmas(sigma_list);
  const auto defaults = global.defaults();
  if (global.csv())
    out << "sigma,old_waste,new_waste,percent_recovered\n";
  else
    out << std::right << std::setw(12) << "sigma" << std::setw(18) << "old_waste"
        << std::setw(18) << "new_waste" << std::setw(12) << "recovered" << '\n';
  for (double sd : sigmas) {
    WorkloadSpec spec{.mean = mean,
                      .sd = sd,
                      .item_count = items,
                      .seed = global.seed,
                      .overhead = global.overhead};
    const auto hist = generate_lognormal(spec);
    const auto r = run_experiment(case_label(mean, sd), hist, defaults,
                                  search.params(global.seed));
    if (global.csv())
      out << sd << ',' << r.old_waste << ',' << r.new_waste << ','
          << percent(r.percent_recovered) << '\n';
    else
      out << std::setw(12) << sd << std::setw(18) << r.old_waste << std::setw(18)
          << r.new_waste << std::setw(12) << percent(r.percent_recovered) << '\n';
  }
  return kExitOk;
}

int cmd_sample(const SourceFlags& src, std::ostream& out, std::ostream& err) {
  const auto sample = fetch_stats_sizes(parse_endpoint(src.server),
                                        std::chrono::milliseconds(src.timeout_ms));
  const auto hist = sample_to_histogram(sample);
  if (hist.empty())
    err << "warning: " << sample.server
        << " reported no sizes (size tracking may be disabled)\n";
  out << to_csv(hist);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Learn slab-class chunk sizes that minimize memory holes",
               "slabtune"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag,
                                  "PRNG seed (default: $SLABTUNE_SEED or 0)");
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"table", "csv"}));
  app.add_option("--page-size", global.page_size, "Slab page size in bytes")
      ->check(CLI::PositiveNumber);
  app.add_option("--min-chunk", global.min_chunk, "Smallest default chunk")
      ->check(CLI::PositiveNumber);
  app.add_option("--growth", global.growth, "Default class growth factor");
  app.add_option("--align", global.align, "Default class alignment")
      ->check(CLI::PositiveNumber);
  app.add_option("--overhead", global.overhead,
                 "Bytes added to each traced or generated item (48 approximates "
                 "Memcached's item header when sizes are raw values)");

  auto* defaults_cmd = app.add_subcommand("defaults", "Print default chunk sizes");

  SourceFlags src;
  std::string slab_sizes;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Report memory holes for a configuration");
  add_sources(analyze_cmd, src);
  analyze_cmd->add_option("--slab-sizes", slab_sizes,
                          "Hyphen-separated chunk sizes (default: defaults)");

  SearchFlags search;
  std::size_t classes = 0;
  bool align8 = false;
  auto* optimize_cmd =
      app.add_subcommand("optimize", "Learn chunk sizes for a histogram");
  add_sources(optimize_cmd, src);
  add_search(optimize_cmd, search);
  optimize_cmd->add_option("--classes", classes, "Class count override")
      ->check(CLI::PositiveNumber);
  optimize_cmd->add_flag("--align8", align8,
                         "Round emitted sizes up to multiples of 8");

  int case_id = 0;
  bool all_cases = false;
  Count items = 1'000'000;
  bool log_space = false;
  auto* reproduce_cmd = app.add_subcommand(
      "reproduce", "Rerun the published log-normal workloads");
  add_search(reproduce_cmd, search);
  auto* case_opt = reproduce_cmd->add_option("--case", case_id, "Case 1-5")
                       ->check(CLI::Range(1, 5));
  reproduce_cmd->add_flag("--all", all_cases, "Run every case")->excludes(case_opt);
  reproduce_cmd->add_option("--items", items, "Items per workload")
      ->check(CLI::PositiveNumber);
  reproduce_cmd->add_flag("--log-space-params", log_space,
                          "Read mean/sd as parameters of the underlying normal");

  double mean = 0;
  std::string sigmas;
  auto* sweep_cmd = app.add_subcommand(
      "sweep-sigma", "Recovered waste as the size spread varies");
  add_search(sweep_cmd, search);
  sweep_cmd->add_option("--mean", mean, "Mean item size in bytes")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--sigmas", sigmas, "Comma-separated standard deviations")
      ->required();
  sweep_cmd->add_option("--items", items, "Items per workload")
      ->check(CLI::PositiveNumber);

  auto* sample_cmd =
      app.add_subcommand("sample", "Print a server's stats sizes as histogram CSV");
  sample_cmd->add_option("--server", src.server, "Memcached host:port")->required();
  sample_cmd->add_option("--timeout-ms", src.timeout_ms, "Sampling timeout")
      ->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"slabtune"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    global.seed = *seed_opt ? seed_flag : seed_from_env();
    try {
      global.defaults();
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    if (*defaults_cmd) return cmd_defaults(global, out);
    if (*analyze_cmd) return cmd_analyze(global, src, slab_sizes, out, err);
    if (*optimize_cmd)
      return cmd_optimize(global, src, search, classes, align8, out);
    if (*reproduce_cmd)
      return cmd_reproduce(global, search, case_id, all_cases, items, log_space,
                           out, err);
    if (*sweep_cmd)
      return cmd_sweep_sigma(global, search, mean, sigmas, items, out);
    if (*sample_cmd) return cmd_sample(src, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace slabtune
