#ifndef LSI_ERRORS_HPP
#define LSI_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsi {

/// Physical parameters outside the admissible set (c > 0, 4w - c^2 > 0, beta != 0).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two fields that must live on the same periodic grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The grid cannot represent the requested field (tail or Nyquist check failed).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, double time)
      : std::runtime_error("non-finite state at step " + std::to_string(step) +
                           " (t = " + std::to_string(time) + ")"),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// An iterative eigensolve stopped at max_iter.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what + " (iterations " + std::to_string(iterations) +
                           ", last residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace lsi

#endif  // LSI_ERRORS_HPP
