#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socdist {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A record that parsed but describes an impossible box.
class RejectedRecordError : public ParseError {
public:
    using ParseError::ParseError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Point maps onto (or beyond) the vanishing line of the ground plane.
class HorizonError : public Error {
public:
    using Error::Error;
};

class NotEnoughDataError : public Error {
public:
    NotEnoughDataError(const std::string& what, std::size_t required, std::size_t available)
        : Error(what), required_(required), available_(available) {}
    std::size_t required() const noexcept { return required_; }
    std::size_t available() const noexcept { return available_; }

private:
    std::size_t required_;
    std::size_t available_;
};

class SequenceError : public Error {
public:
    using Error::Error;
};

class NotVisibleError : public Error {
public:
    using Error::Error;
};

}  // namespace socdist
