#include "tactile/learn/evaluate.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile::learn {

using nlohmann::json;

std::size_t EvalReport::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) t += confusion[i][i];
  return t;
}

json EvalReport::to_json() const {
  json classes = json::array();
  for (auto g : kAllGestures) classes.push_back(std::string(to_string(g)));
  return {{"accuracy", accuracy},   {"total", total},
          {"classes", classes},     {"confusion", confusion},
          {"precision", precision}, {"recall", recall}};
}

std::string EvalReport::render_table() const {
  std::ostringstream out;
  out << "true\\pred";
  for (auto g : kAllGestures) out << std::setw(7) << to_string(g);
  out << std::setw(8) << "recall" << '\n';
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    out << std::left << std::setw(9) << to_string(gesture_from_index(r))
        << std::right;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      out << std::setw(7) << confusion[r][c];
    }
    out << std::setw(8) << std::fixed << std::setprecision(3) << recall[r]
        << '\n';
  }
  out << std::left << std::setw(9) << "precision" << std::right;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out << std::setw(7) << std::fixed << std::setprecision(3) << precision[c];
  }
  out << '\n'
      << "accuracy " << std::fixed << std::setprecision(4) << accuracy << " ("
      << trace() << "/" << total << ")\n";
  return out.str();
}

EvalReport evaluate_predictions(std::span<const GestureClass> truth,
                                std::span<const GestureClass> predicted) {
  if (truth.size() != predicted.size()) {
    throw ConfigError("truth and predictions differ in count");
  }
  EvalReport report;
  report.total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++report.confusion[index_of(truth[i])][index_of(predicted[i])];
  }
  report.accuracy = report.total == 0
                        ? 0.0
                        : static_cast<double>(report.trace()) /
                              static_cast<double>(report.total);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      row += report.confusion[c][k];
      col += report.confusion[k][c];
    }
    const auto hit = static_cast<double>(report.confusion[c][c]);
    report.recall[c] = row ? hit / static_cast<double>(row) : 0.0;
    report.precision[c] = col ? hit / static_cast<double>(col) : 0.0;
  }
  return report;
}

EvalReport evaluate(const TrainedModel& model,
                    std::span<const FeatureVector> features,
                    std::span<const GestureClass> labels) {
  if (features.size() != labels.size()) {
    throw ConfigError("features and labels differ in count");
  }
  std::vector<GestureClass> predicted;
  predicted.reserve(features.size());
  for (const auto& f : features) predicted.push_back(model.predict(f));
  return evaluate_predictions(labels, predicted);
}

void write_confusion_svg(std::ostream& out, const EvalReport& report) {
  constexpr int kCell = 60;
  constexpr int kMargin = 80;
  const int size = kMargin + kCell * static_cast<int>(kNumClasses) + 20;
  std::size_t peak = 1;
  for (const auto& row : report.confusion) {
    for (auto v : row) peak = std::max(peak, v);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    const auto name = to_string(gesture_from_index(i));
    const int pos = kMargin + static_cast<int>(i) * kCell + kCell / 2;
    out << "<text x=\"" << pos << "\" y=\"" << kMargin - 10
        << "\" text-anchor=\"middle\">" << name << "</text>\n";
    out << "<text x=\"" << kMargin - 8 << "\" y=\"" << pos + 4
        << "\" text-anchor=\"end\">" << name << "</text>\n";
  }
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double level = static_cast<double>(report.confusion[r][c]) /
                           static_cast<double>(peak);
      const int shade = 255 - static_cast<int>(level * 200.0);
      const int x = kMargin + static_cast<int>(c) * kCell;
      const int y = kMargin + static_cast<int>(r) * kCell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
          << "\" height=\"" << kCell << "\" fill=\"rgb(" << shade << ","
          << shade << ",255)\" stroke=\"#888\"/>\n";
      out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
          << "\" text-anchor=\"middle\">" << report.confusion[r][c]
          << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace tactile::learn
