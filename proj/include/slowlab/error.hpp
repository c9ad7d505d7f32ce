#pragma once

#include <stdexcept>
#include <string>

namespace slowlab {

// Status codes shared with the C API and the CLI exit codes.
enum class Errc : int {
    ok = 0,
    schema = 2,
    insufficient_fiber_data = 3,
    unsupported_operation = 4,
    invalid_argument = 5,
    numerical_degeneracy = 6,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace slowlab
