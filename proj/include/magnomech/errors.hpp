#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace magnomech {

/// Bad or incomplete configuration input (missing keys, unparsable document).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg, std::vector<std::string> missing = {})
      : std::runtime_error(msg), missing_keys(std::move(missing)) {}
  std::vector<std::string> missing_keys;
};

/// Parameter values violate a hard physical constraint (e.g. nonpositive decay rate).
class validation_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// NaN/Inf intermediates or other floating-point breakdown.
class numerical_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A denominator or pivot vanished; `where` names the offending quantity.
class singularity_error : public std::runtime_error {
 public:
  singularity_error(const std::string& msg, std::string where_)
      : std::runtime_error(msg), where(std::move(where_)) {}
  std::string where;
};

/// Iterative solver failed to reach tolerance.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, double residual_, std::vector<double> history_ = {})
      : std::runtime_error(msg), residual(residual_), history(std::move(history_)) {}
  double residual;
  std::vector<double> history;  // iterate history, when available
};

/// arg(t_p) requested where t_p == 0.
class phase_undefined_error : public std::runtime_error {
 public:
  phase_undefined_error(const std::string& msg, double delta_)
      : std::runtime_error(msg), delta(delta_) {}
  double delta;  // offending probe detuning, rad/s
};

}  // namespace magnomech
