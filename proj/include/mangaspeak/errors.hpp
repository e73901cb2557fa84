#pragma once

#include <stdexcept>
#include <string>

namespace mspk {

// One error type for the whole library; the code maps 1:1 onto the C API
// status values.
class Error : public std::runtime_error {
public:
    enum class Code {
        io,       // file missing / unreadable / unwritable
        parse,    // malformed XML or JSON
        invalid,  // bad value, broken reference, violated invariant
        range,    // argument outside the supported domain
        state,    // operation called before its prerequisites
    };

    Error(Code code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

[[noreturn]] inline void raise(Error::Code code, const std::string& message) {
    throw Error(code, message);
}

} // namespace mspk
