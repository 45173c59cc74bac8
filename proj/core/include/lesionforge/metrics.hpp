#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "lesionforge/volume.hpp"

namespace lesionforge {

struct ImageLevelOutcome {
  std::string study_id;
  bool predicted = false;
  bool actual = false;
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A study is positive when at least one voxel exceeds `threshold` (strictly).
bool image_level_positive(const Volume3D& prediction, double threshold = 0.5);

/// Throws duplicate-id when a study id repeats.
ConfusionCounts confusion(std::span<const ImageLevelOutcome> outcomes);

/// tp / (tp + fn); empty when there are no actual positives.
std::optional<double> sensitivity(const ConfusionCounts& c);

/// tn / (tn + fp); empty when there are no actual negatives.
std::optional<double> specificity(const ConfusionCounts& c);

/// Fixed-point rendering with `digits` decimals, or "N/A".
std::string format_metric(const std::optional<double>& value, int digits = 3);

}  // namespace lesionforge
