#include "cimeter/measure.hpp"

#include "cimeter/errors.hpp"

#include <cmath>
#include <sstream>

namespace cimeter {

double clamp_squared(double raw, std::string_view what, ParamMap* params) {
  if (!std::isfinite(raw)) throw NumericalError(std::string(what) + " is not finite");
  if (raw >= 0.0) return raw;
  if (raw < -kNegativeTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " = " << raw << " is below the negative tolerance " << -kNegativeTolerance;
    throw NumericalError(msg.str());
  }
  if (params) (*params)["clamped_from"] = raw;
  return 0.0;
}

}  // namespace cimeter
