#include "brpv/special.hpp"

#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace brpv {

double normal_sf_inverse(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("normal_sf_inverse: q must lie in (0, 1)");
  }
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

}  // namespace brpv
