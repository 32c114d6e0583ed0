#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Text SCPI dialect used between the radar-kit client and the instrument
// emulator. Messages are single `\r\n`-terminated lines, one command per
// line. Headers are case-insensitive and stored upper-cased; numeric
// values are kept as text so waveform uploads survive round-trips
// unchanged. Long/short header forms are not distinguished.

namespace radarkit::scpi {

inline constexpr std::string_view kTerminator = "\r\n";

/// Structured parse failure: byte offset into the input plus a message.
struct ParseError {
    std::size_t offset = 0;
    std::string message;
};

/// Minimal expected-like result carrier for parser entry points.
template <typename T>
class Result {
  public:
    Result(T value) : v_(std::move(value)) {}
    Result(ParseError error) : v_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T&& value() && { return std::get<T>(std::move(v_)); }
    const ParseError& error() const { return std::get<ParseError>(v_); }

  private:
    std::variant<T, ParseError> v_;
};

/// One mnemonic of a command header, e.g. SOUR1 -> name "SOUR", suffix 1.
struct HeaderToken {
    std::string name;           // upper-cased, possibly with leading '*'
    std::optional<int> suffix;  // trailing channel digits, if any

    bool operator==(const HeaderToken&) const = default;
};

enum class ValueKind { Integer, Decimal, Keyword, Array };

/// A command argument. Scalar kinds keep their literal text; arrays keep
/// one decimal literal per element.
struct Value {
    ValueKind kind = ValueKind::Keyword;
    std::string text;                // Integer/Decimal/Keyword literal
    std::vector<std::string> items;  // Array elements as decimal literals

    static Value integer(long long v);
    static Value decimal(std::string literal);
    static Value keyword(std::string word);
    static Value array(std::vector<std::string> literals);
    static Value array(std::span<const double> values);

    /// Numeric accessors; throw std::invalid_argument on kind mismatch or
    /// unparseable text.
    long long as_int() const;
    double as_double() const;
    /// Array (or single numeric scalar) as doubles.
    std::vector<double> as_doubles() const;

    bool operator==(const Value&) const = default;
};

struct Command {
    std::vector<HeaderToken> path;
    bool is_query = false;
    std::vector<Value> args;

    bool operator==(const Command&) const = default;

    /// Path token names joined with ':', suffixes stripped, '?' appended
    /// for queries. Used as the dispatch key, e.g. "ACQ:SOUR:DATA?".
    std::string dispatch_key() const;
};

/// Parse one complete message (without its terminator). Never throws on
/// malformed input; arbitrary bytes yield a ParseError.
Result<Command> parse_message(std::string_view line);

/// Canonical text form, such that parse_message(serialize_command(c)) == c
/// for any command in canonical form (arrays of >= 2 elements, and no
/// multiple all-numeric scalar arguments, which the grammar would re-read
/// as a single array).
std::string serialize_command(const Command& cmd);

/// Parse a brace-delimited array response payload, e.g. "{0.5,-1}".
Result<std::vector<double>> parse_buffer_response(std::string_view payload);

/// Brace-delimited array payload. Elements are formatted with the shortest
/// representation that parses back to the identical double. Throws
/// std::invalid_argument on non-finite input.
std::string serialize_array(std::span<const double> values);

/// Shortest round-trip decimal text for a finite double.
std::string format_double(double v);

}  // namespace radarkit::scpi
