#include "pkam/errors.hpp"

#include <sstream>

namespace pkam {

namespace {

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
  os << ')';
  return os.str();
}

}  // namespace

ResonantMode::ResonantMode(std::vector<int> mode, double divisor)
    : Error("resonant mode " + join(mode) + " with divisor " + std::to_string(divisor)),
      mode_(std::move(mode)),
      divisor_(divisor) {}

DegenerateTorus::DegenerateTorus(std::vector<double> theta, std::string condition,
                                 double cond_number)
    : Error("degenerate torus at theta=" + join(theta) + ": " + condition +
            " has condition number " + std::to_string(cond_number)),
      theta_(std::move(theta)),
      condition_(std::move(condition)),
      cond_number_(cond_number) {}

}  // namespace pkam
