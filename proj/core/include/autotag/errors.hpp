#pragma once

#include <stdexcept>
#include <string>

namespace autotag {

// Base for every error the library raises on purpose. Precondition
// violations on arguments use std::invalid_argument instead.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class GenerationExhausted : public Error
{
public:
    using Error::Error;
};

class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

class UnknownId : public Error
{
public:
    using Error::Error;
};

// One-class input to Otsu (every sample shares a single intensity).
class Degenerate : public Error
{
public:
    using Error::Error;
};

class WindowTooLarge : public Error
{
public:
    using Error::Error;
};

class DegenerateQuad : public Error
{
public:
    using Error::Error;
};

class SingularHomography : public Error
{
public:
    using Error::Error;
};

class ZeroArea : public Error
{
public:
    using Error::Error;
};

class PlacementOverlap : public Error
{
public:
    using Error::Error;
};

class OutOfBounds : public Error
{
public:
    using Error::Error;
};

class NoTruths : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error
{
public:
    ValidationError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace autotag
