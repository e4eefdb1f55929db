#pragma once

#include <stdexcept>
#include <string>

namespace simpkit {

// Input content is malformed or inconsistent (misaligned files, empty
// sentences where forbidden, unparseable records). CLI exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A required file or resource is missing or unreadable. CLI exit code 3.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// The model or decoder failed on an input (OOV prefix token, no usable
// hypothesis). CLI exit code 4.
struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace simpkit
