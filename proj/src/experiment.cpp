#include "slabtune/experiment.hpp"

namespace slabtune {

double percent_recovered(Bytes old_waste, Bytes new_waste) {
  if (old_waste == 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(new_waste) /
                            static_cast<double>(old_waste));
}

ExperimentReport run_experiment(std::string label, const SizeHistogram& hist,
                                const SlabConfig& defaults,
                                const OptimizerParams& params, Bytes align) {
  auto old_config = initial_config(hist, defaults, params.classes);
  auto result = optimize(hist, defaults, params);

  SlabConfig new_config = result.config;
  Bytes new_waste = result.wasted_bytes;
  if (align > 1) {
    new_config = align_up_config(result.config, align);
    new_waste = wasted_bytes(new_config, hist);
    auto aligned_old = align_up_config(old_config, align);
    if (const auto w = wasted_bytes(aligned_old, hist); w < new_waste) {
      new_config = std::move(aligned_old);
      new_waste = w;
    }
  }

  ExperimentReport report{
      .label = std::move(label),
      .old_config = std::move(old_config),
      .new_config = std::move(new_config),
      .old_waste = result.initial_wasted_bytes,
      .new_waste = new_waste,
      .percent_recovered = 0.0,
      .item_count = hist.total_items(),
      .seed = params.seed,
  };
  report.percent_recovered = percent_recovered(report.old_waste, report.new_waste);
  return report;
}

const std::vector<PublishedCase>& published_cases() {
  static const std::vector<PublishedCase> cases = {
      {1, 518.0, 10.5, {304, 384, 480, 600, 752, 944},
       {461, 510, 557, 614, 702, 943}, 62'013'552, 32'809'986, 47.09},
      {2, 1210.0, 15.8, {944, 1184, 1480, 1856}, {1173, 1280, 1414, 1735},
       147'403'935, 74'979'930, 49.13},
      {3, 2109.0, 16.6, {1856, 2320, 2904}, {2120, 2287, 2643}, 230'144'462,
       111'980'981, 51.34},
      {4, 4133.0, 15.8, {4544, 5680}, {4246, 4644}, 410'568'873, 181'599'689,
       55.76},
      {5, 8131.0, 15.2, {8880}, {8628}, 748'193'597, 496'353'869, 33.65},
  };
  return cases;
}

}  // namespace slabtune
