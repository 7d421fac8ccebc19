#pragma once

#include <stdexcept>
#include <string>

namespace pairspec {

// Bad input: wrong dimensions, angles outside (0, pi), non-projection, ...
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Configured size limit exceeded (tensor dimension cap).
class ResourceCapError : public std::runtime_error {
public:
    explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file or configuration text.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed in a way the caller cannot recover from.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pairspec
