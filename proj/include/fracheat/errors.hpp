#ifndef FRACHEAT_ERRORS_HPP
#define FRACHEAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fracheat {

// Bad arguments, shape mismatches, out-of-range exponents.
class input_error : public std::invalid_argument {
public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// A quadrature or series failed to reach the requested accuracy.
// `achieved` is the best estimate of the attained accuracy (digits or
// relative error depending on context, see the message).
class accuracy_error : public std::runtime_error {
public:
  accuracy_error(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved(achieved), requested(requested) {}
  double achieved;
  double requested;
};

class infeasible_error : public std::runtime_error {
public:
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fracheat

#endif
