#include "radarkit/scpi.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace radarkit::scpi {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_alpha(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

char to_upper(char c) {
    return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

// Integer literal: optional sign, digits only.
bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), is_digit);
}

// Decimal literal: optional sign, digits with optional '.' and exponent.
// Deliberately excludes inf/nan spellings.
bool is_decimal_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    std::size_t i = 0;
    std::size_t digits = 0;
    while (i < s.size() && is_digit(s[i])) { ++i; ++digits; }
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) { ++i; ++digits; }
    }
    if (digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && is_digit(s[i])) { ++i; ++exp_digits; }
        if (exp_digits == 0) return false;
    }
    return i == s.size();
}

bool is_numeric_literal(std::string_view s) {
    return is_integer_literal(s) || is_decimal_literal(s);
}

// Keyword arguments may carry any printable byte except separators and
// the brace characters reserved for array responses.
bool is_keyword_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x21 || u == 0x7f) return false;
    return c != ',' && c != '{' && c != '}';
}

double parse_double_or_throw(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("not a numeric literal: '" + std::string(text) + "'");
    return v;
}

}  // namespace

Value Value::integer(long long v) {
    Value out;
    out.kind = ValueKind::Integer;
    out.text = std::to_string(v);
    return out;
}

Value Value::decimal(std::string literal) {
    Value out;
    out.kind = ValueKind::Decimal;
    out.text = std::move(literal);
    return out;
}

Value Value::keyword(std::string word) {
    Value out;
    out.kind = ValueKind::Keyword;
    out.text = std::move(word);
    return out;
}

Value Value::array(std::vector<std::string> literals) {
    Value out;
    out.kind = ValueKind::Array;
    out.items = std::move(literals);
    return out;
}

Value Value::array(std::span<const double> values) {
    Value out;
    out.kind = ValueKind::Array;
    out.items.reserve(values.size());
    for (double v : values) out.items.push_back(format_double(v));
    return out;
}

long long Value::as_int() const {
    if (kind == ValueKind::Array)
        throw std::invalid_argument("array value has no single integer form");
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("not an integer: '" + text + "'");
    return v;
}

double Value::as_double() const {
    if (kind == ValueKind::Array)
        throw std::invalid_argument("array value has no single numeric form");
    return parse_double_or_throw(text);
}

std::vector<double> Value::as_doubles() const {
    std::vector<double> out;
    if (kind == ValueKind::Array) {
        out.reserve(items.size());
        for (const auto& item : items) out.push_back(parse_double_or_throw(item));
    } else {
        out.push_back(as_double());
    }
    return out;
}

std::string Command::dispatch_key() const {
    std::string key;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) key += ':';
        key += path[i].name;
    }
    if (is_query) key += '?';
    return key;
}

namespace {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
};

// Reads one header token at the cursor: optional '*' (first token only),
// a letter, then alphanumerics; trailing digits split off as the suffix.
Result<HeaderToken> read_token(Cursor& c, bool allow_star) {
    HeaderToken tok;
    std::size_t start = c.pos;
    if (allow_star && !c.done() && c.peek() == '*') {
        tok.name += '*';
        ++c.pos;
    }
    if (c.done() || !is_alpha(c.peek()))
        return ParseError{c.pos, "expected header mnemonic"};
    while (!c.done() && (is_alpha(c.peek()) || is_digit(c.peek()))) {
        tok.name += to_upper(c.peek());
        ++c.pos;
    }
    // Split a trailing digit run into the channel suffix.
    std::size_t name_end = tok.name.size();
    while (name_end > 0 && is_digit(tok.name[name_end - 1])) --name_end;
    if (name_end == 0 || (tok.name[0] == '*' && name_end == 1))
        return ParseError{start, "header mnemonic must contain letters"};
    if (name_end < tok.name.size()) {
        int suffix = 0;
        auto digits = std::string_view(tok.name).substr(name_end);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), suffix);
        if (ec != std::errc{} || ptr != digits.data() + digits.size())
            return ParseError{start + name_end, "channel suffix out of range"};
        tok.suffix = suffix;
        tok.name.resize(name_end);
    }
    return tok;
}

Result<std::vector<Value>> parse_args(std::string_view region, std::size_t region_offset) {
    // Split on commas; an empty piece is a syntax error.
    std::vector<std::pair<std::string_view, std::size_t>> pieces;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= region.size(); ++i) {
        if (i == region.size() || region[i] == ',') {
            std::string_view piece = region.substr(start, i - start);
            std::size_t piece_off = start;
            while (!piece.empty() && is_space(piece.front())) {
                piece.remove_prefix(1);
                ++piece_off;
            }
            while (!piece.empty() && is_space(piece.back())) piece.remove_suffix(1);
            if (piece.empty())
                return ParseError{region_offset + start, "empty argument element"};
            pieces.emplace_back(piece, region_offset + piece_off);
            start = i + 1;
        }
    }

    for (const auto& [piece, off] : pieces) {
        for (std::size_t i = 0; i < piece.size(); ++i) {
            if (piece[i] == '{' || piece[i] == '}')
                return ParseError{off + i, "braces are reserved for array responses"};
            if (!is_keyword_char(piece[i]))
                return ParseError{off + i, "invalid byte in argument"};
        }
    }

    std::vector<Value> args;
    if (pieces.size() >= 2) {
        // A comma list is always one array argument of decimals; no command
        // in this dialect takes multiple scalar arguments.
        std::vector<std::string> items;
        items.reserve(pieces.size());
        for (const auto& [piece, off] : pieces) {
            if (!is_numeric_literal(piece))
                return ParseError{off, "non-numeric array element"};
            items.emplace_back(piece);
        }
        args.push_back(Value::array(std::move(items)));
        return args;
    }
    const auto& [piece, off] = pieces.front();
    if (is_integer_literal(piece))
        args.push_back(Value{ValueKind::Integer, std::string(piece), {}});
    else if (is_decimal_literal(piece))
        args.push_back(Value{ValueKind::Decimal, std::string(piece), {}});
    else
        args.push_back(Value{ValueKind::Keyword, std::string(piece), {}});
    return args;
}

}  // namespace

Result<Command> parse_message(std::string_view line) {
    Cursor c{line};
    while (!c.done() && is_space(c.peek())) ++c.pos;
    if (c.done()) return ParseError{c.pos, "empty message"};

    for (std::size_t i = c.pos; i < line.size(); ++i) {
        if (line[i] == '\r' || line[i] == '\n')
            return ParseError{i, "embedded line terminator"};
    }

    Command cmd;
    bool first = true;
    while (true) {
        auto tok = read_token(c, first);
        if (!tok.ok()) return tok.error();
        cmd.path.push_back(std::move(tok).value());
        first = false;
        if (!c.done() && c.peek() == ':') {
            ++c.pos;
            continue;
        }
        break;
    }
    if (!c.done() && c.peek() == '?') {
        cmd.is_query = true;
        ++c.pos;
    }

    if (!c.done() && !is_space(c.peek()))
        return ParseError{c.pos, "unexpected byte after header"};
    while (!c.done() && is_space(c.peek())) ++c.pos;

    if (!c.done()) {
        std::string_view region = line.substr(c.pos);
        // Trim trailing whitespace from the argument region.
        while (!region.empty() && is_space(region.back())) region.remove_suffix(1);
        if (!region.empty()) {
            auto args = parse_args(region, c.pos);
            if (!args.ok()) return args.error();
            cmd.args = std::move(args).value();
        }
    }
    return cmd;
}

std::string serialize_command(const Command& cmd) {
    std::string out;
    for (std::size_t i = 0; i < cmd.path.size(); ++i) {
        if (i > 0) out += ':';
        out += cmd.path[i].name;
        if (cmd.path[i].suffix) out += std::to_string(*cmd.path[i].suffix);
    }
    if (cmd.is_query) out += '?';
    bool first = true;
    for (const auto& arg : cmd.args) {
        out += first ? " " : ",";
        first = false;
        if (arg.kind == ValueKind::Array) {
            for (std::size_t i = 0; i < arg.items.size(); ++i) {
                if (i > 0) out += ',';
                out += arg.items[i];
            }
        } else {
            out += arg.text;
        }
    }
    return out;
}

Result<std::vector<double>> parse_buffer_response(std::string_view payload) {
    std::size_t begin = 0;
    std::size_t end = payload.size();
    while (begin < end && is_space(payload[begin])) ++begin;
    while (end > begin && is_space(payload[end - 1])) --end;
    if (begin == end) return ParseError{begin, "empty payload"};
    if (payload[begin] != '{') return ParseError{begin, "expected '{'"};
    if (payload[end - 1] != '}') return ParseError{end - 1, "unbalanced braces"};

    std::string_view body = payload.substr(begin + 1, end - begin - 2);
    std::size_t body_off = begin + 1;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '{' || body[i] == '}')
            return ParseError{body_off + i, "unbalanced braces"};
        if (body[i] == '\r' || body[i] == '\n')
            return ParseError{body_off + i, "newline inside array response"};
    }

    std::vector<double> out;
    if (body.empty()) return out;

    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i == body.size() || body[i] == ',') {
            std::string_view piece = body.substr(start, i - start);
            std::size_t off = body_off + start;
            while (!piece.empty() && is_space(piece.front())) {
                piece.remove_prefix(1);
                ++off;
            }
            while (!piece.empty() && is_space(piece.back())) piece.remove_suffix(1);
            if (piece.empty()) return ParseError{off, "empty array element"};
            if (!is_numeric_literal(piece))
                return ParseError{off, "non-numeric array element"};
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
            if (ec != std::errc{} || ptr != piece.data() + piece.size())
                return ParseError{off, "non-numeric array element"};
            out.push_back(v);
            start = i + 1;
        }
    }
    return out;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string serialize_array(std::span<const double> values) {
    std::string out = "{";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(values[i]);
    }
    out += '}';
    return out;
}

}  // namespace radarkit::scpi
