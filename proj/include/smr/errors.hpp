#ifndef SMR_ERRORS_HPP
#define SMR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace smr {

/// Error while reading a text input (stack file, Touchstone, CSV).
/// Carries the 1-based line and column of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column = 0)
        : std::runtime_error(format(message, line, column)),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        std::string s = "line " + std::to_string(line);
        if (column > 0)
            s += ", column " + std::to_string(column);
        return s + ": " + message;
    }

    int line_;
    int column_;
};

/// Numeric failure inside a solver (singular transform, conversion
/// singularity). When the failure is tied to a grid point, the frequency
/// is recorded.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& message)
        : std::runtime_error(message), frequency_(0.0) {}

    NumericError(const std::string& message, double frequency_hz)
        : std::runtime_error(message + " at f = " + std::to_string(frequency_hz) + " Hz"),
          frequency_(frequency_hz) {}

    double frequency() const { return frequency_; }

private:
    double frequency_;
};

} // namespace smr

#endif // SMR_ERRORS_HPP
