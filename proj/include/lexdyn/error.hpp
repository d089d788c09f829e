#ifndef LEXDYN_ERROR_HPP
#define LEXDYN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace lexdyn {

// Exit codes used by the CLI. Library code throws; the CLI maps the
// exception class to one of these.
enum class ExitStatus : int {
    Ok = 0,
    Usage = 1,      // bad flags, unreadable config, missing inputs
    Data = 2,       // malformed corpus/keyword/series content
    Numeric = 3,    // degenerate series, rank-deficient fits, unstable models
};

// Configuration / usage problems (exit 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (exit 2).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures and degenerate inputs (exit 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Rank-deficient least-squares design; carries the offending column indices.
struct CollinearError : NumericError {
    std::vector<int> columns;
    CollinearError(const std::string& what, std::vector<int> cols)
        : NumericError(what), columns(std::move(cols)) {}
};

}  // namespace lexdyn

#endif
