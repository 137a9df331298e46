#include "tactile/learn/ablation.hpp"

#include <iomanip>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile::learn {

using nlohmann::json;

const AblationRow& AblationResult::row(FeatureKind kind) const {
  for (const auto& r : rows) {
    if (r.kind == kind) return r;
  }
  throw ConfigError("ablation has no row for '" +
                    std::string(tactile::to_string(kind)) + "'");
}

json AblationResult::to_json() const {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"label", r.label},
                   {"feature", std::string(tactile::to_string(r.kind))},
                   {"accuracy", r.report.accuracy},
                   {"train_samples", r.train_samples},
                   {"test_samples", r.test_samples},
                   {"dropped", r.dropped},
                   {"report", r.report.to_json()}});
  }
  return {{"rows", out}};
}

std::string AblationResult::render_table() const {
  std::ostringstream s;
  s << std::left << std::setw(6) << "row" << std::setw(22) << "feature"
    << std::right << std::setw(10) << "accuracy" << std::setw(8) << "train"
    << std::setw(8) << "test" << '\n';
  for (const auto& r : rows) {
    s << std::left << std::setw(6) << r.label << std::setw(22)
      << tactile::to_string(r.kind) << std::right << std::setw(10) << std::fixed
      << std::setprecision(4) << r.report.accuracy << std::setw(8)
      << r.train_samples << std::setw(8) << r.test_samples << '\n';
  }
  return s.str();
}

AblationResult ablation_run(const Dataset& dataset,
                            std::span<const FeatureKind> kinds,
                            const PipelineConfig& pipeline,
                            const DenseNetConfig& config) {
  const auto train = dataset.subset(Split::Train);
  const auto test = dataset.subset(Split::Test);
  AblationResult result;
  for (auto kind : kinds) {
    const std::string tag = "feature '" + std::string(tactile::to_string(kind)) + "': ";
    try {
      const auto train_table = build_feature_table(train, kind, pipeline);
      const auto test_table = build_feature_table(test, kind, pipeline);
      if (train_table.features.empty() || test_table.features.empty()) {
        throw ConfigError("no usable samples in train or test split");
      }
      const auto model =
          train_mlp(train_table.features, train_table.required_labels(), config);
      AblationRow row;
      row.kind = kind;
      row.label = std::string(short_label(kind));
      row.report =
          evaluate(model, test_table.features, test_table.required_labels());
      row.train_samples = train_table.features.size();
      row.test_samples = test_table.features.size();
      row.dropped = train_table.dropped + test_table.dropped;
      result.rows.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(e.kind(), tag + e.what());
    }
  }
  return result;
}

}  // namespace tactile::learn
