#ifndef GBM_ERRORS_HPP
#define GBM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbm {

/// Invalid configuration or input data (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during a run (CLI exit code 1).
class SimulationError : public std::runtime_error {
public:
  SimulationError(std::size_t step, const std::string &what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), m_step(step) {}
  std::size_t step() const { return m_step; }

private:
  std::size_t m_step;
};

} // namespace gbm

#endif // GBM_ERRORS_HPP
