#pragma once

#include <stdexcept>
#include <string>

namespace symbreak {

// Input outside a function's smooth/valid domain (zero row, parallel rows,
// point off the fixed-point space, ...). CLI exit code 4.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative method failed to meet its tolerance. CLI exit code 3.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed request (unknown family, bad flag combination, ...). CLI exit code 2.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symbreak
