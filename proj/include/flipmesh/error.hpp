#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flipmesh {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DegenerateInput : public Error
{
public:
    using Error::Error;
};

class PreconditionViolated : public Error
{
public:
    using Error::Error;
};

class NotCoplanar : public Error
{
public:
    using Error::Error;
};

class NotFlippable : public Error
{
public:
    using Error::Error;
};

class NonManifoldInput : public Error
{
public:
    using Error::Error;
};

/// Malformed mesh file. Carries the 1-based line number of the offending record.
class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what)
        , line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NonTriangularFace : public ParseError
{
public:
    using ParseError::ParseError;
};

class EmptyPatch : public Error
{
public:
    using Error::Error;
};

class NoProxy : public Error
{
public:
    using Error::Error;
};

class TooManyPoints : public Error
{
public:
    using Error::Error;
};

class DegenerateConfiguration : public Error
{
public:
    using Error::Error;
};

class VertexSetMismatch : public Error
{
public:
    using Error::Error;
};

class SpecInvariantViolated : public Error
{
public:
    using Error::Error;
};

class JitterBrokeMesh : public Error
{
public:
    using Error::Error;
};

} // namespace flipmesh
