#pragma once

#include <stdexcept>
#include <string>

namespace synthforge {

/// Bad user input: malformed config files, invalid parameter values.
/// The CLI maps this to exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem and codec failures at run time. The CLI maps this to exit code 2.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace synthforge
