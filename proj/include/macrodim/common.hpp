#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace macrodim {

// Exit-code categories map onto these (see runner).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Largest number of doubles a single trajectory or field may hold.
inline constexpr std::int64_t kMaxSamples = std::int64_t{1} << 27;
// Largest number of cells materialized from an arithmetic progression.
inline constexpr std::int64_t kMaxEnumeratedCells = std::int64_t{1} << 25;

enum class Exec { serial, parallel };

// Shortest round-trip decimal form.
inline std::string fmt(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace macrodim
