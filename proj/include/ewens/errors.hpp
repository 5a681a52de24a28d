#pragma once

#include <stdexcept>
#include <string>

namespace ewens {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside the supported domain (n = 0, theta <= 0, non-integer
// inverse temperature on the exact path, ...).
struct DomainError : Error {
    using Error::Error;
};

// A value-level invariant is violated (allele counts not summing to n,
// nonpositive field entry, ...).
struct ConstraintError : Error {
    using Error::Error;
};

// An enumeration bound was exceeded (factorial oracle above n = 8,
// configuration sweep above the state budget).
struct ResourceError : Error {
    using Error::Error;
};

// Structural misuse of tree regions and growth steps (duplicate vertex,
// detached vertex, malformed step).
struct StructureError : Error {
    using Error::Error;
};

// A required table entry is absent (spin without a value, field table
// without an entry for a (spin, vertex) pair).
struct MissingEntryError : Error {
    using Error::Error;
};

}  // namespace ewens
