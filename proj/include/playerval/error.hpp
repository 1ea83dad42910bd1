#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace playerval {

// Pipeline error carrying a stable machine-readable name (e.g. "DuplicateKey")
// next to the human message. The CLI prints the name on stderr and exits
// nonzero; tests match on it.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

[[noreturn]] inline void raise(std::string name, const std::string& message) {
    throw Error(std::move(name), message);
}

} // namespace playerval
