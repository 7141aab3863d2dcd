#pragma once

#include <stdexcept>
#include <string>

namespace prony {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The data do not determine the support at the requested order: the moment
/// matrix has no kernel, the rank split is ambiguous, or extraction left
/// unresolved regions. Callers may retry with a larger order.
class NotIdentifiable : public Error {
public:
    using Error::Error;
};

}  // namespace prony
