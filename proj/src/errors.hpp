#pragma once

#include <stdexcept>
#include <string>

namespace lucid {

// Input text could not be decoded (bad JSON, bad CSV header, bad vector string, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated an operation precondition (empty input, unknown field, bad enum token).
class InvalidArgument : public std::runtime_error {
public:
    explicit InvalidArgument(const std::string& what) : std::runtime_error(what) {}
};

// An operation was invoked in the wrong store/lifecycle state (sealed vs. building).
class StateError : public std::runtime_error {
public:
    explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lucid
