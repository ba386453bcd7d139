#pragma once

#include <stdexcept>
#include <string>

namespace dcs {

// Data and format errors surfaced to callers; the CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dcs
