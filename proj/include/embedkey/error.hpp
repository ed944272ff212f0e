#pragma once

#include <stdexcept>
#include <string>

namespace embedkey {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the remaining domain failures so callers can tell them apart.

/// Malformed external data. `field()` names the offending field or token.
class FormatError : public std::runtime_error {
public:
    FormatError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Base58Check payload whose checksum does not match.
class ChecksumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file missing or unreadable, output file not writable.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace embedkey
