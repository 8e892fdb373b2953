#pragma once

#include <stdexcept>
#include <string>

namespace corematch {

/// Thrown when an operation would exceed its configured combinatorial budget
/// (brute-force enumeration, exhaustive subset scans). Callers must shrink the
/// instance or raise the limit knowingly.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a computed object violates an invariant the implementation
/// guarantees. Indicates a bug, not bad input.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace corematch
