#include "lesionforge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "lesionforge/error.hpp"

namespace lesionforge {

bool image_level_positive(const Volume3D& prediction, double threshold) {
  const auto values = prediction.data();
  return std::any_of(values.begin(), values.end(),
                     [threshold](double v) { return v > threshold; });
}

ConfusionCounts confusion(std::span<const ImageLevelOutcome> outcomes) {
  ConfusionCounts c;
  std::unordered_set<std::string> seen;
  for (const auto& o : outcomes) {
    if (!seen.insert(o.study_id).second) {
      throw Error(ErrorKind::DuplicateId, "study id '" + o.study_id + "' appears twice");
    }
    if (o.actual) {
      ++(o.predicted ? c.tp : c.fn);
    } else {
      ++(o.predicted ? c.fp : c.tn);
    }
  }
  return c;
}

std::optional<double> sensitivity(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> specificity(const ConfusionCounts& c) {
  if (c.tn + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

std::string format_metric(const std::optional<double>& value, int digits) {
  if (!value) return "N/A";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *value);
  return buf;
}

}  // namespace lesionforge
