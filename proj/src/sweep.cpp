#include "rea/sweep.hpp"

#include <map>
#include <sstream>

#include "rea/data.hpp"
#include "rea/error.hpp"

namespace rea {

std::vector<SweepRow> sweep_retrieval(const Dataset& dataset, const SplitSpec& split,
                                      TargetKind kind, const TrainConfig& base,
                                      const SweepSpec& spec) {
  if (spec.k1_values.empty() || spec.seeds.empty() || spec.modes.empty()) {
    throw ValidationError("sweep needs at least one mode, k1 value and seed");
  }
  const Problem problem = Problem::prepare(dataset, split, Variant::rea, kind);
  std::vector<SweepRow> rows;
  for (auto mode : spec.modes) {
    for (auto k1 : spec.k1_values) {
      for (auto seed : spec.seeds) {
        TrainConfig config = base;
        config.variant = Variant::rea;
        config.mode = mode;
        config.k1 = k1;
        config.seed = seed;
        config.validate_each_epoch = false;
        const auto result = train(problem, config);
        const auto ev = evaluate(result.params, result.history, problem, config, spec.partition);
        rows.push_back({mode, config.total_comparables(), seed, ev.report.mdae, ev.report.mdabre});
      }
    }
  }
  return rows;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummary> out;
  std::map<std::pair<int, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> cells;
  std::vector<std::pair<int, std::size_t>> order;
  for (const auto& r : rows) {
    const auto key = std::pair{static_cast<int>(r.mode), r.total_comparables};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.first.push_back(r.mdae);
    it->second.second.push_back(r.mdabre);
  }
  for (const auto& key : order) {
    const auto& [mdaes, mdabres] = cells.at(key);
    out.push_back({static_cast<RetrievalMode>(key.first), key.second, mean_ci95(mdaes),
                   mean_ci95(mdabres)});
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "mode,total_comparables,seed,mdae,mdabre\n";
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << r.total_comparables << ',' << r.seed << ','
        << format_double(r.mdae) << ',' << format_double(r.mdabre) << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<SweepSummary>& summary) {
  std::ostringstream out;
  out << "mode,total_comparables,n_seeds,mdae_mean,mdae_ci95,mdabre_mean,mdabre_ci95\n";
  for (const auto& s : summary) {
    out << to_string(s.mode) << ',' << s.total_comparables << ',' << s.mdae.n << ','
        << format_double(s.mdae.mean) << ',' << format_double(s.mdae.ci95) << ','
        << format_double(s.mdabre.mean) << ',' << format_double(s.mdabre.ci95) << '\n';
  }
  return out.str();
}

std::vector<ModelRow> compare_models(const Dataset& dataset, const SplitSpec& split,
                                     TargetKind kind, const ComparisonSpec& spec) {
  if (spec.seeds.empty()) throw ValidationError("model comparison needs at least one seed");
  std::vector<ModelRow> rows;
  const Problem rea_problem = Problem::prepare(dataset, split, Variant::rea, kind);
  const auto lr = baseline_linear(rea_problem, spec.partition);
  rows.push_back({"LR", 0, lr.mdae, lr.mdabre});
  const auto knn = baseline_knn(rea_problem, spec.partition, spec.knn_k, spec.knn_space);
  rows.push_back({"kNN", 0, knn.mdae, knn.mdabre});

  const Problem erea_problem = Problem::prepare(dataset, split, Variant::erea, kind);
  for (const auto* base : {&spec.rea, &spec.erea}) {
    const bool erea = base == &spec.erea;
    const Problem& problem = erea ? erea_problem : rea_problem;
    for (auto seed : spec.seeds) {
      TrainConfig config = *base;
      config.variant = erea ? Variant::erea : Variant::rea;
      config.seed = seed;
      config.validate_each_epoch = false;
      const auto result = train(problem, config);
      const auto ev = evaluate(result.params, result.history, problem, config, spec.partition);
      rows.push_back({erea ? "EREA" : "REA", seed, ev.report.mdae, ev.report.mdabre});
    }
  }
  return rows;
}

std::string comparison_csv(const std::vector<ModelRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> cells;
  for (const auto& r : rows) {
    auto [it, inserted] = cells.try_emplace(r.model);
    if (inserted) order.push_back(r.model);
    it->second.first.push_back(r.mdae);
    it->second.second.push_back(100.0 * r.mdabre);
  }
  std::ostringstream out;
  out << "model,n_seeds,mdae_mean,mdae_ci95,mdabre_pct_mean,mdabre_pct_ci95\n";
  for (const auto& model : order) {
    const auto mdae = mean_ci95(cells.at(model).first);
    const auto mdabre = mean_ci95(cells.at(model).second);
    out << model << ',' << mdae.n << ',' << format_double(mdae.mean) << ','
        << format_double(mdae.ci95) << ',' << format_double(mdabre.mean) << ','
        << format_double(mdabre.ci95) << '\n';
  }
  return out.str();
}

}  // namespace rea
