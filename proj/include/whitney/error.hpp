#pragma once

#include <stdexcept>
#include <string>

namespace whitney {

/// Structured failure raised by every module. what() carries the
/// machine-parsable prefix `E:<module>:<check>` followed by a message.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string check, const std::string& message)
        : std::runtime_error("E:" + module + ":" + check + ": " + message),
          module_(std::move(module)), check_(std::move(check)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& check() const noexcept { return check_; }

private:
    std::string module_;
    std::string check_;
};

} // namespace whitney
