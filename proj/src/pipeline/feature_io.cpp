#include <ostream>

#include "tactile/pipeline.hpp"

namespace tactile {

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "participant,label,kind";
  const std::size_t width =
      table.features.empty() ? 0 : table.features.front().values.size();
  for (std::size_t i = 0; i < width; ++i) out << ",v" << i;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t r = 0; r < table.features.size(); ++r) {
    out << table.participants[r] << ','
        << (table.labels[r] ? to_string(*table.labels[r]) : "") << ','
        << to_string(table.kind);
    for (double v : table.features[r].values) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace tactile
