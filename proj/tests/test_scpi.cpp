#include <doctest.h>

#include <cctype>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "radarkit/scpi.hpp"
#include "support/scpi_gen.hpp"

using namespace radarkit::scpi;

namespace {

// Independent brute-force scanner for waveform uploads: splits the line at
// the first space, then the tail at commas. Used as the round-trip oracle
// for array arguments.
std::vector<std::string> reference_upload_scan(const std::string& line) {
    std::vector<std::string> out;
    const auto space = line.find(' ');
    if (space == std::string::npos) return out;
    std::string current;
    for (std::size_t i = space + 1; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(current);
            current.clear();
        } else if (!std::isspace(static_cast<unsigned char>(line[i]))) {
            current += line[i];
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("scpi") {

TEST_CASE("minimal set command") {
    auto result = parse_message("ACQ:DEC 8");
    REQUIRE(result.ok());
    const auto& cmd = result.value();
    REQUIRE(cmd.path.size() == 2);
    CHECK(cmd.path[0].name == "ACQ");
    CHECK_FALSE(cmd.path[0].suffix.has_value());
    CHECK(cmd.path[1].name == "DEC");
    CHECK_FALSE(cmd.is_query);
    REQUIRE(cmd.args.size() == 1);
    CHECK(cmd.args[0].kind == ValueKind::Integer);
    CHECK(cmd.args[0].as_int() == 8);
}

TEST_CASE("minimal query with channel suffix") {
    auto result = parse_message("ACQ:SOUR1:DATA?");
    REQUIRE(result.ok());
    const auto& cmd = result.value();
    REQUIRE(cmd.path.size() == 3);
    CHECK(cmd.path[1].name == "SOUR");
    REQUIRE(cmd.path[1].suffix.has_value());
    CHECK(*cmd.path[1].suffix == 1);
    CHECK(cmd.is_query);
    CHECK(cmd.args.empty());
}

TEST_CASE("headers case-normalize, keyword arguments keep their case") {
    auto result = parse_message("sim:Route prescaler");
    REQUIRE(result.ok());
    CHECK(result.value().path[0].name == "SIM");
    CHECK(result.value().path[1].name == "ROUTE");
    REQUIRE(result.value().args.size() == 1);
    CHECK(result.value().args[0].kind == ValueKind::Keyword);
    CHECK(result.value().args[0].text == "prescaler");
}

TEST_CASE("common commands *IDN? and *RST") {
    auto idn = parse_message("*IDN?");
    REQUIRE(idn.ok());
    CHECK(idn.value().path.size() == 1);
    CHECK(idn.value().path[0].name == "*IDN");
    CHECK(idn.value().is_query);

    auto rst = parse_message("*RST");
    REQUIRE(rst.ok());
    CHECK(rst.value().path[0].name == "*RST");
    CHECK_FALSE(rst.value().is_query);
}

TEST_CASE("waveform upload parses as one decimal array") {
    const std::string line = "SOUR1:TRAC:DATA:DATA 0.7,0.70004,0.70008,1";
    auto result = parse_message(line);
    REQUIRE(result.ok());
    const auto& cmd = result.value();
    REQUIRE(cmd.args.size() == 1);
    REQUIRE(cmd.args[0].kind == ValueKind::Array);
    const auto ref = reference_upload_scan(line);
    REQUIRE(cmd.args[0].items.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(cmd.args[0].items[i] == ref[i]);
}

TEST_CASE("upload round-trip matches the reference scanner on random arrays") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> len(2, 200);
    for (int it = 0; it < 200; ++it) {
        Command cmd;
        cmd.path = {HeaderToken{"SOUR", 1}, HeaderToken{"TRAC", {}}, HeaderToken{"DATA", {}},
                    HeaderToken{"DATA", {}}};
        std::vector<std::string> items;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) items.push_back(scpi_gen::random_decimal_literal(rng));
        cmd.args.push_back(Value::array(items));

        const std::string line = serialize_command(cmd);
        auto reparsed = parse_message(line);
        REQUIRE(reparsed.ok());
        CHECK(reparsed.value() == cmd);
        CHECK(reparsed.value().args[0].items == reference_upload_scan(line));
    }
}

TEST_CASE("serialization examples") {
    Command start;
    start.path = {HeaderToken{"ACQ", {}}, HeaderToken{"START", {}}};
    CHECK(serialize_command(start) == "ACQ:START");

    Command data;
    data.path = {HeaderToken{"ACQ", {}}, HeaderToken{"SOUR", 2}, HeaderToken{"DATA", {}}};
    data.is_query = true;
    CHECK(serialize_command(data) == "ACQ:SOUR2:DATA?");
}

TEST_CASE("round-trip property over generated commands") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto cmd = scpi_gen::random_command(rng);
        auto reparsed = parse_message(serialize_command(cmd));
        REQUIRE(reparsed.ok());
        CHECK(reparsed.value() == cmd);
    }
}

TEST_CASE("buffer response basics") {
    auto zeros = parse_buffer_response("{0,0,0}");
    REQUIRE(zeros.ok());
    CHECK(zeros.value() == std::vector<double>{0.0, 0.0, 0.0});

    auto pair = parse_buffer_response("{-0.5,0.25}");
    REQUIRE(pair.ok());
    CHECK(pair.value() == std::vector<double>{-0.5, 0.25});

    auto empty = parse_buffer_response("{}");
    REQUIRE(empty.ok());
    CHECK(empty.value().empty());
}

TEST_CASE("buffer response errors carry byte offsets") {
    auto unbalanced = parse_buffer_response("{1,2");
    REQUIRE_FALSE(unbalanced.ok());

    auto nested = parse_buffer_response("{1,{2}}");
    REQUIRE_FALSE(nested.ok());
    CHECK(nested.error().message == "unbalanced braces");

    auto empty_elem = parse_buffer_response("{1,,2}");
    REQUIRE_FALSE(empty_elem.ok());
    CHECK(empty_elem.error().offset == 3);

    auto nan_token = parse_buffer_response("{1,nan}");
    REQUIRE_FALSE(nan_token.ok());

    auto inf_token = parse_buffer_response("{inf}");
    REQUIRE_FALSE(inf_token.ok());

    auto word = parse_buffer_response("{1,abc}");
    REQUIRE_FALSE(word.ok());
    CHECK(word.error().offset == 3);
}

TEST_CASE("array fidelity: values survive serialize/parse exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_int_distribution<int> len(0, 300);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> values(static_cast<std::size_t>(len(rng)));
        for (auto& v : values) v = uni(rng) * std::pow(10.0, uni(rng) * 8.0);
        const std::string text = serialize_array(values);
        auto parsed = parse_buffer_response(text);
        REQUIRE(parsed.ok());
        REQUIRE(parsed.value().size() == values.size());
        for (std::size_t i = 0; i < values.size(); ++i) CHECK(parsed.value()[i] == values[i]);
        // Text-level idempotence.
        CHECK(serialize_array(parsed.value()) == text);
    }
}

TEST_CASE("array fidelity at the 16384-sample buffer limit") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> values(16384);
    for (auto& v : values) v = uni(rng);
    auto parsed = parse_buffer_response(serialize_array(values));
    REQUIRE(parsed.ok());
    CHECK(parsed.value() == values);
}

TEST_CASE("parse errors name byte offsets") {
    auto bad_header = parse_message("1ACQ:DEC 8");
    REQUIRE_FALSE(bad_header.ok());
    CHECK(bad_header.error().offset == 0);

    auto empty_tok = parse_message("ACQ::DEC 8");
    REQUIRE_FALSE(empty_tok.ok());
    CHECK(empty_tok.error().offset == 4);

    auto brace_arg = parse_message("ACQ:DEC {8}");
    REQUIRE_FALSE(brace_arg.ok());
    CHECK(brace_arg.error().offset == 8);

    auto mixed_array = parse_message("SOUR1:TRAC:DATA:DATA 0.5,abc,1.0");
    REQUIRE_FALSE(mixed_array.ok());
    CHECK(mixed_array.error().message == "non-numeric array element");

    CHECK_FALSE(parse_message("").ok());
    CHECK_FALSE(parse_message("   ").ok());
    CHECK_FALSE(parse_message("ACQ:DEC 8\r\nACQ:DEC?").ok());
}

TEST_CASE("parser survives arbitrary bytes up to 1 MiB") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> byte(0, 255);

    // Fully random bytes: must return a command or an in-bounds error.
    std::string blob(1 << 20, '\0');
    for (auto& c : blob) c = static_cast<char>(byte(rng));
    auto r = parse_message(blob);
    if (!r.ok()) CHECK(r.error().offset <= blob.size());

    // Structured-ish fuzz: SCPI alphabet soup.
    static constexpr char alphabet[] = "ACQDEC:?,.{}-+eE0123456789 \t*";
    std::uniform_int_distribution<int> pick(0, sizeof(alphabet) - 2);
    std::uniform_int_distribution<int> len(0, 2000);
    for (int it = 0; it < 2000; ++it) {
        std::string line(static_cast<std::size_t>(len(rng)), '\0');
        for (auto& c : line) c = alphabet[pick(rng)];
        auto result = parse_message(line);
        if (result.ok()) {
            // Whatever parses must re-parse to the same structure.
            auto again = parse_message(serialize_command(result.value()));
            REQUIRE(again.ok());
            CHECK(again.value() == result.value());
        } else {
            CHECK(result.error().offset <= line.size());
        }
    }
}

TEST_CASE("format_double rejects non-finite input") {
    CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)serialize_array(std::vector<double>{
                        std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
}

}  // TEST_SUITE
