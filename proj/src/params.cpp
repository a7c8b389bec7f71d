#include "potwell/params.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>

namespace potwell {

void Params::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("Params: " + msg); };

  if (dim != 1 && dim != 2) fail("dim must be 1 or 2");
  if (!(p > 1.0)) fail("requires p > 1");
  const double qlo = std::max(p - 1.0, 1.0);
  if (!(q > qlo)) {
    std::ostringstream os;
    os << "requires q > max{p-1, 1} = " << qlo;
    fail(os.str());
  }
  if (p < static_cast<double>(dim)) {
    const double qhi = dim * p / (dim - p) - 1.0;
    if (!(q < qhi)) {
      std::ostringstream os;
      os << "requires q < n*p/(n-p) - 1 = " << qhi << " for p < n";
      fail(os.str());
    }
  }
  // Implied by the above, but every exponent formula divides by it.
  if (!(q + 1.0 - p > 0.0)) fail("requires q + 1 - p > 0");
}

} // namespace potwell
