#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace cimeter {

using ParamValue = std::variant<double, std::int64_t, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

/// Values of squared measures in (-kNegativeTolerance, 0) are rounding noise and clamp to 0;
/// anything lower is a numerical-integrity failure.
inline constexpr double kNegativeTolerance = 1e-10;

struct MeasureResult {
  double value = 0.0;
  std::string estimator;
  ParamMap params;  // every default that was applied, so the result is reproducible
  Eigen::Index n = 0;
};

/// Applies the clamping rule. Records "clamped_from" in params when a clamp happened.
/// Throws NumericalError naming `what` below -kNegativeTolerance.
double clamp_squared(double raw, std::string_view what, ParamMap* params = nullptr);

}  // namespace cimeter
