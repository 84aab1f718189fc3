#pragma once

#include <stdexcept>
#include <string>

namespace advisor {

/// Base class for every error raised by the advisor library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two vectors (or a vector and a rule) are defined over different schemas,
/// or a catalog token has no counterpart in the schema.
class SchemaMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed catalog, schema, lexicon, transcript or questionnaire data.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace advisor
