#include "aeromix/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/rng.hpp"
#include "aeromix/split.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

const char* to_string(ProductId p) {
  switch (p) {
    case ProductId::MDB: return "MDB";
    case ProductId::MDT: return "MDT";
    case ProductId::VDB: return "VDB";
    case ProductId::VDT: return "VDT";
  }
  return "?";
}

ProductId product_from_string(const std::string& s) {
  if (s == "MDB") return ProductId::MDB;
  if (s == "MDT") return ProductId::MDT;
  if (s == "VDB") return ProductId::VDB;
  if (s == "VDT") return ProductId::VDT;
  fail(ErrorClass::ParseError, "unknown product '" + s + "'");
}

std::vector<FusionScenario> canonical_scenarios() {
  using P = ProductId;
  return {
      {1, {P::MDB, P::VDB}},
      {2, {P::MDB, P::MDT, P::VDB}},
      {3, {P::MDB, P::VDB, P::VDT}},
      {4, {P::MDB, P::MDT, P::VDB, P::VDT}},
      {5, {P::MDT, P::VDT}},
      {6, {P::MDB, P::MDT, P::VDT}},
      {7, {P::MDT, P::VDB, P::VDT}},
      {8, {P::MDB, P::MDT}},
      {9, {P::VDB, P::VDT}},
      {10, {P::MDB, P::VDT}},
      {11, {P::MDT, P::VDB}},
  };
}

FusionScenario scenario_by_id(int id) {
  for (const auto& s : canonical_scenarios()) {
    if (s.id == id) return s;
  }
  fail(ErrorClass::ValidationError, "scenario id must lie in 1..11, got " + std::to_string(id));
}

std::optional<double> fuse_data_level(const std::vector<WindowSample>& samples) {
  // Canonical accumulation order keeps the result independent of how the
  // caller ordered the samples.
  std::vector<const WindowSample*> ordered;
  ordered.reserve(samples.size());
  for (const auto& s : samples) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const WindowSample* a, const WindowSample* b) {
              if (a->sensor != b->sensor) return a->sensor < b->sensor;
              if (a->algorithm != b->algorithm) return a->algorithm < b->algorithm;
              return a->mean_aod < b->mean_aod;
            });

  double numerator = 0.0;
  double denominator = 0.0;
  for (const WindowSample* s : ordered) {
    if (!s->valid || s->weight <= 0.0) continue;
    numerator += s->weight * s->mean_aod;
    denominator += s->weight;
  }
  if (denominator <= 0.0) return std::nullopt;
  return numerator / denominator;
}

namespace {

unsigned full_mask(std::size_t n_products) {
  return (1u << n_products) - 1u;
}

// Least squares of targets on the decision columns (one per product in the
// mask) plus bias.
LinearModel fit_combiner(const std::vector<std::vector<double>>& decision_rows,
                         const std::vector<double>& targets) {
  const std::size_t n = decision_rows.size();
  const std::size_t arity = decision_rows.front().size();
  std::vector<double> x;
  x.reserve(n * arity);
  for (const auto& row : decision_rows) x.insert(x.end(), row.begin(), row.end());
  return fit_linear(x, n, arity, targets);
}

}  // namespace

std::optional<double> DecisionFusionModel::predict_subset(
    const std::map<ProductId, double>& decisions) const {
  unsigned mask = 0;
  std::vector<double> values;
  for (std::size_t i = 0; i < products.size(); ++i) {
    const auto it = decisions.find(products[i]);
    if (it == decisions.end()) continue;
    mask |= 1u << i;
    values.push_back(it->second);
  }
  if (mask == 0) return std::nullopt;
  const auto it = combiners.find(mask);
  if (it == combiners.end()) {
    // Too few co-valid training rows for this subset; mean of decisions.
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  return predict(it->second, values);
}

DecisionFusionModel train_decision_fusion(
    const FusionScenario& scenario,
    const std::map<ProductId, TrainingMatrix>& matrices,
    const std::map<ProductId, GbtParams>& params, std::uint64_t seed) {
  if (scenario.products.empty()) {
    fail(ErrorClass::ValidationError, "scenario has no products");
  }
  for (ProductId p : scenario.products) {
    if (!matrices.count(p)) {
      fail(ErrorClass::PipelineError,
           std::string("missing training matrix for product ") + to_string(p));
    }
    if (!params.count(p)) {
      fail(ErrorClass::PipelineError,
           std::string("missing hyperparameters for product ") + to_string(p));
    }
  }

  DecisionFusionModel model;
  model.scenario_id = scenario.id;
  model.products = scenario.products;

  // Keys where every scenario product is valid.
  std::map<ProductId, std::map<RowKey, std::size_t>> key_index;
  for (ProductId p : scenario.products) {
    key_index[p] = matrices.at(p).key_index();
  }
  std::vector<RowKey> covalid;
  {
    const auto& first_index = key_index.at(scenario.products.front());
    for (const auto& [key, row] : first_index) {
      bool everywhere = true;
      for (std::size_t i = 1; i < scenario.products.size(); ++i) {
        if (!key_index.at(scenario.products[i]).count(key)) {
          everywhere = false;
          break;
        }
      }
      if (everywhere) covalid.push_back(key);
    }
  }
  if (covalid.empty()) {
    fail(ErrorClass::PipelineError,
         "scenario " + std::to_string(scenario.id) +
             ": no key is valid in every product; cannot train the fusion stack");
  }

  // Base models: one GBT per product on its co-valid rows.
  for (std::size_t i = 0; i < scenario.products.size(); ++i) {
    const ProductId p = scenario.products[i];
    const TrainingMatrix& full = matrices.at(p);
    const auto& index = key_index.at(p);
    std::vector<std::size_t> rows;
    rows.reserve(covalid.size());
    for (const RowKey& key : covalid) rows.push_back(index.at(key));
    std::sort(rows.begin(), rows.end());
    GbtParams tuned = params.at(p);
    tuned.seed = derive_seed(seed, static_cast<std::uint64_t>(p));
    model.base_models.emplace(p, fit_gbt(full.subset(rows), tuned));
  }

  // Decisions per product over every key that product covers.
  std::map<ProductId, std::map<RowKey, double>> decisions_by_product;
  for (ProductId p : scenario.products) {
    const TrainingMatrix& full = matrices.at(p);
    const GBTModel& base = model.base_models.at(p);
    auto& decisions = decisions_by_product[p];
    for (std::size_t i = 0; i < full.n_rows(); ++i) {
      decisions.emplace(full.key(i), base.predict(full.row(i)));
    }
  }

  // Combiners: for every non-empty product subset, least squares over the
  // keys where that whole subset is valid. The full set always gets one.
  const unsigned all = full_mask(scenario.products.size());
  for (unsigned mask = 1; mask <= all; ++mask) {
    std::vector<ProductId> subset;
    for (std::size_t i = 0; i < scenario.products.size(); ++i) {
      if (mask & (1u << i)) subset.push_back(scenario.products[i]);
    }
    // Keys valid across the subset.
    std::vector<RowKey> keys;
    for (const auto& [key, row] : key_index.at(subset.front())) {
      bool ok = true;
      for (std::size_t i = 1; i < subset.size(); ++i) {
        if (!key_index.at(subset[i]).count(key)) {
          ok = false;
          break;
        }
      }
      if (ok) keys.push_back(key);
    }
    if (keys.size() < subset.size() + 2) {
      if (mask == all) {
        fail(ErrorClass::PipelineError,
             "scenario " + std::to_string(scenario.id) +
                 ": too few co-valid keys (" + std::to_string(keys.size()) +
                 ") to fit the stacking combiner");
      }
      continue;  // predict_subset falls back to the decision mean
    }

    std::vector<std::vector<double>> decision_rows;
    std::vector<double> targets;
    decision_rows.reserve(keys.size());
    targets.reserve(keys.size());
    for (const RowKey& key : keys) {
      std::vector<double> decisions;
      decisions.reserve(subset.size());
      for (ProductId p : subset) {
        decisions.push_back(decisions_by_product.at(p).at(key));
      }
      decision_rows.push_back(std::move(decisions));
      // Targets agree across products at one key; take the first subset member.
      targets.push_back(
          matrices.at(subset.front()).target(key_index.at(subset.front()).at(key)));
    }
    model.combiners.emplace(mask, fit_combiner(decision_rows, targets));
  }
  return model;
}

double apply_decision_fusion(const DecisionFusionModel& model,
                             const DecisionVector& decisions) {
  std::vector<double> values;
  values.reserve(model.products.size());
  for (ProductId p : model.products) {
    const auto it = decisions.estimates.find(p);
    if (it == decisions.estimates.end()) {
      fail(ErrorClass::ValidationError,
           std::string("decision vector missing product ") + to_string(p));
    }
    values.push_back(it->second);
  }
  if (decisions.estimates.size() != model.products.size()) {
    fail(ErrorClass::ValidationError,
         "decision vector carries products outside the scenario");
  }
  const auto it = model.combiners.find(full_mask(model.products.size()));
  if (it == model.combiners.end()) {
    fail(ErrorClass::Internal, "fusion model lacks its full-set combiner");
  }
  return predict(it->second, values);
}

double coverage_percent(std::size_t valid_count, std::size_t domain_size) {
  if (domain_size == 0) {
    fail(ErrorClass::ValidationError, "coverage over an empty domain");
  }
  return 100.0 * static_cast<double>(valid_count) / static_cast<double>(domain_size);
}

ScenarioReport run_scenario(const FusionScenario& scenario,
                            const std::map<ProductId, TrainingMatrix>& matrices,
                            const std::vector<RowKey>& all_keys,
                            const ScenarioRunParams& run,
                            DecisionFusionModel* out_model) {
  if (run.grid.empty()) {
    fail(ErrorClass::ValidationError, "run_scenario: empty hyperparameter grid");
  }
  ScenarioReport report;
  report.scenario = scenario;

  std::map<ProductId, std::map<RowKey, std::size_t>> key_index;
  for (ProductId p : scenario.products) {
    if (!matrices.count(p)) {
      fail(ErrorClass::PipelineError,
           std::string("dataset lacks product ") + to_string(p));
    }
    key_index[p] = matrices.at(p).key_index();
  }

  // Coverage census over the full key domain.
  std::set<RowKey> union_keys;
  for (ProductId p : scenario.products) {
    const auto& index = key_index.at(p);
    report.product_coverage[p] = coverage_percent(index.size(), all_keys.size());
    for (const auto& [key, row] : index) union_keys.insert(key);
  }
  report.fused_coverage = coverage_percent(union_keys.size(), all_keys.size());

  // Co-valid keys, deterministically ordered, then a seeded 75/25 split.
  std::vector<RowKey> covalid;
  for (const auto& [key, row] : key_index.at(scenario.products.front())) {
    bool everywhere = true;
    for (std::size_t i = 1; i < scenario.products.size(); ++i) {
      if (!key_index.at(scenario.products[i]).count(key)) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) covalid.push_back(key);
  }
  const SplitIndices split = split_indices(
      covalid.size(), run.split_ratio,
      derive_seed(run.seed, 1000 + static_cast<std::uint64_t>(scenario.id)));
  std::set<RowKey> test_keys;
  for (std::size_t i : split.test) test_keys.insert(covalid[i]);
  report.n_train = split.train.size();
  report.n_test = split.test.size();
  report.test_keys.assign(test_keys.begin(), test_keys.end());

  // Training pool: everything that is not a test key (partially valid keys
  // included, they feed the subset combiners).
  std::map<ProductId, TrainingMatrix> train_matrices;
  for (ProductId p : scenario.products) {
    const TrainingMatrix& full = matrices.at(p);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < full.n_rows(); ++i) {
      if (!test_keys.count(full.key(i))) rows.push_back(i);
    }
    train_matrices.emplace(p, full.subset(rows));
  }

  // Per-product CV on the co-valid training rows.
  std::map<ProductId, GbtParams> tuned;
  for (ProductId p : scenario.products) {
    const TrainingMatrix& full = matrices.at(p);
    const auto& index = key_index.at(p);
    std::vector<std::size_t> rows;
    for (std::size_t i : split.train) rows.push_back(index.at(covalid[i]));
    std::sort(rows.begin(), rows.end());
    const TrainingMatrix cv_matrix = full.subset(rows);

    std::vector<GbtParams> grid = run.grid;
    for (auto& g : grid) {
      g.seed = derive_seed(run.seed, 2000 + static_cast<std::uint64_t>(p));
    }
    const CvResult cv = kfold_cv(cv_matrix, grid, run.cv_folds,
                                 derive_seed(run.seed, 3000 + static_cast<std::uint64_t>(p)));
    tuned[p] = cv.best_params();
  }
  report.tuned_params = tuned;

  DecisionFusionModel model = train_decision_fusion(
      scenario, train_matrices, tuned, derive_seed(run.seed, 4000 + static_cast<std::uint64_t>(scenario.id)));

  // Paired evaluation on the shared test keys.
  std::vector<double> targets;
  std::vector<double> fused_pred;
  std::map<ProductId, std::vector<double>> product_pred;
  for (const RowKey& key : report.test_keys) {
    DecisionVector decisions;
    for (ProductId p : scenario.products) {
      const TrainingMatrix& full = matrices.at(p);
      const std::size_t row = key_index.at(p).at(key);
      const double estimate = model.base_models.at(p).predict(full.row(row));
      decisions.estimates[p] = estimate;
      product_pred[p].push_back(estimate);
    }
    fused_pred.push_back(apply_decision_fusion(model, decisions));
    const ProductId first = scenario.products.front();
    targets.push_back(matrices.at(first).target(key_index.at(first).at(key)));
  }
  report.fused_metrics = compute_metrics(targets, fused_pred);
  for (ProductId p : scenario.products) {
    report.product_metrics[p] = compute_metrics(targets, product_pred[p]);
  }

  if (out_model != nullptr) *out_model = std::move(model);
  return report;
}

void write_scenario_reports_csv(const std::vector<ScenarioReport>& reports,
                                const std::string& path) {
  CsvTable table;
  table.header = {"scenario", "member",   "role", "r2",      "rmse",
                  "mae",      "coverage", "n",    "n_train", "n_test"};
  for (const ScenarioReport& report : reports) {
    for (ProductId p : report.scenario.products) {
      const Metrics& m = report.product_metrics.at(p);
      table.rows.push_back({std::to_string(report.scenario.id), to_string(p), "base",
                            format_g(m.r2, 9), format_g(m.rmse, 9), format_g(m.mae, 9),
                            format_g(report.product_coverage.at(p), 9),
                            std::to_string(m.n), std::to_string(report.n_train),
                            std::to_string(report.n_test)});
    }
    const Metrics& f = report.fused_metrics;
    table.rows.push_back({std::to_string(report.scenario.id), "fused", "fused",
                          format_g(f.r2, 9), format_g(f.rmse, 9), format_g(f.mae, 9),
                          format_g(report.fused_coverage, 9), std::to_string(f.n),
                          std::to_string(report.n_train), std::to_string(report.n_test)});
  }
  write_csv(path, table);
}

std::string format_scenario_table(const std::vector<ScenarioReport>& reports) {
  std::ostringstream out;
  out << "scenario  member  r2       rmse     mae      coverage%\n";
  char line[160];
  for (const ScenarioReport& report : reports) {
    for (ProductId p : report.scenario.products) {
      const Metrics& m = report.product_metrics.at(p);
      std::snprintf(line, sizeof(line), "%8d  %-6s  %-7.3f  %-7.2f  %-7.2f  %-7.2f\n",
                    report.scenario.id, to_string(p), m.r2, m.rmse, m.mae,
                    report.product_coverage.at(p));
      out << line;
    }
    const Metrics& f = report.fused_metrics;
    std::snprintf(line, sizeof(line), "%8d  %-6s  %-7.3f  %-7.2f  %-7.2f  %-7.2f\n",
                  report.scenario.id, "fused", f.r2, f.rmse, f.mae,
                  report.fused_coverage);
    out << line;
  }
  return out.str();
}

}  // namespace aeromix
