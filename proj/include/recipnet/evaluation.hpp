#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace recipnet {

/// Confusion counts and derived metrics for labels in {+1, -1}.
struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::optional<double> precision;  ///< nullopt when nothing is predicted positive
  std::optional<double> recall;     ///< nullopt when there are no true positives
  double f1 = 0.0;                  ///< 0 when either component is 0 or undefined
  double accuracy = 0.0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

/// Throws ArgumentError on length mismatch, empty input or labels outside {+1, -1}.
EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth);

}  // namespace recipnet
