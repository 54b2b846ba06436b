#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rch {

// Library error carrying a stable machine-readable code next to the
// human-readable message, e.g. code "not-a-loop" or "invalid-family".
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace rch
