#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chatda {

// Errors carry the exit code the CLI maps them to.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 3; }
};

// Malformed or insufficient input data.
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Invalid arguments or configuration.
class UsageError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

// Class order is significant: it is the tie-break order for voting
// (lower index wins) and the row/column order of confusion matrices.
enum class Appropriateness : int { Inappropriate = 0, Neutral = 1, Appropriate = 2 };

inline constexpr std::size_t kNumClasses = 3;

inline constexpr std::array<Appropriateness, kNumClasses> kAllClasses = {
    Appropriateness::Inappropriate, Appropriateness::Neutral, Appropriateness::Appropriate};

std::string_view to_string(Appropriateness a);
std::optional<Appropriateness> parse_appropriateness(std::string_view s);

inline constexpr std::size_t index_of(Appropriateness a) { return static_cast<std::size_t>(a); }

} // namespace chatda
