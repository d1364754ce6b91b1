#ifndef OSAQ_ERRORS_HPP
#define OSAQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace osaq {

/// A model parameter is outside its admissible domain. The message names the
/// offending field.
class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver (singular block, reducible chain,
/// capacity refusal).
class solver_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal-consistency violation detected while partitioning a generator
/// (entries outside the level-tridiagonal envelope).
class structure_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed experiment config. `line` is 1-based; 0 means "not line-specific".
class config_error : public std::runtime_error {
public:
    config_error(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace osaq

#endif
