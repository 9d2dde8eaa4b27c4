#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "omega/bits.hpp"
#include "omega/machine.hpp"

using namespace omega;
using bits::BitString;
using bits::DyadicRational;
using machine::Machine;
using machine::Op;

namespace {

BitString bs(const std::string& text) { return BitString::parse(text); }

Machine three_program_table() {
  machine::TableMachine table;
  table.programs[bs("0001")] = bs("1");
  table.programs[bs("000001")] = bs("10");
  table.programs[bs("000011")] = bs("11");
  return Machine(std::move(table));
}

Machine universal() { return Machine(machine::UniversalMachine{}); }

machine::Halted expect_halted(const machine::RunOutcome& outcome) {
  REQUIRE(std::holds_alternative<machine::Halted>(outcome));
  return std::get<machine::Halted>(outcome);
}

}  // namespace

TEST_CASE("table machine: run answers in one step") {
  auto m = three_program_table();
  const auto& h = expect_halted(machine::run(m, bs("0001")));
  CHECK(h.output == bs("1"));
  CHECK(h.steps == 1);
  CHECK(h.bits_consumed == 4);

  auto miss = machine::run(m, bs("0000"));
  CHECK(std::holds_alternative<machine::Invalid>(miss));
}

TEST_CASE("table machine constructor validates the key set") {
  machine::TableMachine bad;
  bad.programs[bs("0")] = BitString();
  bad.programs[bs("01")] = BitString();
  CHECK_THROWS_WITH_AS(Machine(std::move(bad)), doctest::Contains("(0, 01)"),
                       ValidationError);

  machine::TableMachine empty;
  CHECK_THROWS_AS(Machine(std::move(empty)), ValidationError);
}

TEST_CASE("validate_table: kraft sums and the complete-code boundary") {
  auto m = three_program_table();
  auto validation = machine::validate_table(m.table());
  CHECK(validation.ok());
  CHECK(validation.kraft == DyadicRational::from_parts(3, 5));
  CHECK(!validation.complete_boundary);

  machine::TableMachine boundary;
  boundary.programs[bs("0")] = BitString();
  boundary.programs[bs("1")] = BitString();
  auto boundary_validation = machine::validate_table(boundary);
  CHECK(boundary_validation.ok());
  CHECK(boundary_validation.kraft == DyadicRational::one());
  CHECK(boundary_validation.complete_boundary);

  machine::TableMachine violating;
  violating.programs[bs("0")] = BitString();
  violating.programs[bs("01")] = BitString();
  auto verdict = machine::validate_table(violating);
  CHECK(!verdict.ok());
  CHECK(verdict.check.first == bs("0"));
  CHECK(verdict.check.second == bs("01"));
}

TEST_CASE("machine spec loader: table round trip and defaults") {
  auto m = Machine::parse_spec(
      R"({"format":1,"type":"table","programs":[
           {"bits":"0001","output":"1"},
           {"bits":"000001"}]})",
      "test");
  REQUIRE(m.is_table());
  CHECK(m.table().programs.at(bs("0001")) == bs("1"));
  CHECK(m.table().programs.at(bs("000001")) == BitString());  // output defaults to ""
}

TEST_CASE("machine spec loader: strictness") {
  CHECK_THROWS_AS(Machine::parse_spec("not json", "test"), LoadError);
  CHECK_THROWS_AS(Machine::parse_spec(R"({"type":"table","programs":[]})", "test"),
                  LoadError);  // missing format
  CHECK_THROWS_AS(
      Machine::parse_spec(
          R"({"format":1,"type":"table","programs":[{"bits":"0"}],"extra":1})",
          "test"),
      LoadError);
  CHECK_THROWS_AS(
      Machine::parse_spec(
          R"({"format":1,"type":"table","programs":[{"bits":"0","color":"red"}]})",
          "test"),
      LoadError);
  CHECK_THROWS_AS(
      Machine::parse_spec(
          R"({"format":1,"type":"table","programs":[{"bits":"01x"}]})", "test"),
      LoadError);
  CHECK_THROWS_AS(
      Machine::parse_spec(R"({"format":1,"type":"universal","isa":"bitbf-v2"})",
                          "test"),
      LoadError);
  CHECK_THROWS_AS(Machine::parse_spec(R"({"format":1,"type":"quantum"})", "test"),
                  LoadError);

  // Domain-rule failures, as opposed to schema failures.
  CHECK_THROWS_AS(
      Machine::parse_spec(
          R"({"format":1,"type":"table","programs":[{"bits":"0"},{"bits":"0"}]})",
          "test"),
      ValidationError);
  CHECK_THROWS_AS(
      Machine::parse_spec(
          R"({"format":1,"type":"table","programs":[{"bits":"0"},{"bits":"01"}]})",
          "test"),
      ValidationError);
  CHECK_THROWS_AS(
      Machine::parse_spec(R"({"format":1,"type":"table","programs":[]})", "test"),
      ValidationError);
}

TEST_CASE("decode_program: worked examples") {
  auto halt_only = machine::decode_program(bs("1000"));
  REQUIRE(std::holds_alternative<machine::Program>(halt_only));
  CHECK(std::get<machine::Program>(halt_only).ops ==
        std::vector<Op>{Op::Halt});

  auto out_halt = machine::decode_program(bs("010111000"));
  REQUIRE(std::holds_alternative<machine::Program>(out_halt));
  CHECK(std::get<machine::Program>(out_halt).ops ==
        std::vector<Op>{Op::Out, Op::Halt});
}

TEST_CASE("decode_program: rejection reasons are specific") {
  using Reason = machine::InvalidProgram::Reason;
  auto reason = [](const std::string& text) {
    auto result = machine::decode_program(BitString::parse(text));
    REQUIRE(std::holds_alternative<machine::InvalidProgram>(result));
    return std::get<machine::InvalidProgram>(result).reason;
  };
  CHECK(reason("") == Reason::TruncatedHeader);
  CHECK(reason("0") == Reason::TruncatedHeader);
  CHECK(reason("00") == Reason::TruncatedHeader);
  CHECK(reason("01") == Reason::TruncatedHeader);  // ends inside the value bits
  CHECK(reason("1") == Reason::TruncatedBody);
  CHECK(reason("01000") == Reason::TruncatedBody);  // promises 2 ops, has bits for 1
  CHECK(reason("10001") == Reason::TrailingBits);
  CHECK(reason("1101") == Reason::UnbalancedLoops);  // lone LOOP-BEGIN
  CHECK(reason("1110") == Reason::UnbalancedLoops);  // lone LOOP-END
}

TEST_CASE("encode_program/decode_program round trip") {
  std::mt19937_64 rng(0x5eed0101);
  int round_trips = 0;
  while (round_trips < 200) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<Op> ops;
    for (std::size_t i = 0; i < n; ++i) ops.push_back(static_cast<Op>(rng() % 8));
    const BitString encoded = machine::encode_program(ops);
    auto decoded = machine::decode_program(encoded);
    if (std::holds_alternative<machine::InvalidProgram>(decoded)) {
      CHECK(std::get<machine::InvalidProgram>(decoded).reason ==
            machine::InvalidProgram::Reason::UnbalancedLoops);
      continue;
    }
    CHECK(std::get<machine::Program>(decoded).ops == ops);
    CHECK(std::get<machine::Program>(decoded).length_bits() == encoded.size());
    ++round_trips;
  }
}

TEST_CASE("bitbf-v1: hand-simulated runs") {
  auto m = universal();

  SUBCASE("HALT only") {
    const auto& h = expect_halted(machine::run(m, bs("1000")));
    CHECK(h.output == BitString());
    CHECK(h.steps == 1);
    CHECK(h.bits_consumed == 4);
  }
  SUBCASE("INC then OUT emits 1") {
    const auto& h = expect_halted(machine::run(m, bs("010001111")));
    CHECK(h.output == bs("1"));
    CHECK(h.steps == 2);
    CHECK(h.bits_consumed == 9);
  }
  SUBCASE("OUT then HALT emits 0") {
    const auto& h = expect_halted(machine::run(m, bs("010111000")));
    CHECK(h.output == bs("0"));
    CHECK(h.steps == 2);
  }
  SUBCASE("loop skipped when the cell is zero") {
    // gamma(2) + LOOP-BEGIN LOOP-END: the skip itself is the only step.
    const auto& h = expect_halted(machine::run(m, bs("010101110")));
    CHECK(h.output == BitString());
    CHECK(h.steps == 1);
  }
  SUBCASE("counting loop runs once and falls off the end") {
    // INC LOOP-BEGIN DEC LOOP-END
    const BitString program =
        machine::encode_program(std::vector<Op>{Op::Inc, Op::LoopBegin, Op::Dec, Op::LoopEnd});
    const auto& h = expect_halted(machine::run(m, program));
    CHECK(h.steps == 4);  // INC, enter loop, DEC, exit test
    CHECK(h.output == BitString());
  }
  SUBCASE("DEC saturates at zero") {
    const BitString program =
        machine::encode_program(std::vector<Op>{Op::Dec, Op::Out});
    const auto& h = expect_halted(machine::run(m, program));
    CHECK(h.output == bs("0"));
  }
  SUBCASE("tape extends to the left") {
    const BitString program =
        machine::encode_program(std::vector<Op>{Op::Left, Op::Inc, Op::Out});
    const auto& h = expect_halted(machine::run(m, program));
    CHECK(h.output == bs("1"));
    CHECK(h.steps == 3);
  }
  SUBCASE("INC LOOP-BEGIN LOOP-END never halts") {
    const BitString program =
        machine::encode_program(std::vector<Op>{Op::Inc, Op::LoopBegin, Op::LoopEnd});
    CHECK(program == bs("011001101110"));
    auto outcome = machine::run(m, program, {1000});
    REQUIRE(std::holds_alternative<machine::Exhausted>(outcome));
    CHECK(std::get<machine::Exhausted>(outcome).fuel == 1000);
  }
  SUBCASE("invalid strings are values, not faults") {
    auto outcome = machine::run(m, bs("10001"));
    REQUIRE(std::holds_alternative<machine::Invalid>(outcome));
    CHECK(std::get<machine::Invalid>(outcome).reason.find("trailing bits") !=
          std::string::npos);
  }
}

namespace {

// Brute-force reference: every bitstring of length <= max_bits, decoded.
std::vector<BitString> brute_force_valid(std::size_t max_bits) {
  std::vector<BitString> accepted;
  for (std::size_t len = 0; len <= max_bits; ++len) {
    for (std::uint64_t value = 0; value < (std::uint64_t{1} << len); ++value) {
      BitString candidate;
      for (std::size_t b = 0; b < len; ++b) {
        candidate.push_back((value >> (len - 1 - b)) & 1);
      }
      if (std::holds_alternative<machine::Program>(machine::decode_program(candidate))) {
        accepted.push_back(candidate);
      }
    }
  }
  return accepted;
}

}  // namespace

TEST_CASE("bitbf-v1 accepted set up to 14 bits: prefix-free, consumption-exact") {
  auto m = universal();
  const auto accepted = brute_force_valid(14);
  // 6 one-op + 37 two-op + 234 three-op balanced bodies.
  CHECK(accepted.size() == 277);
  CHECK(bits::is_prefix_free(accepted).ok());
  std::size_t halted_count = 0;
  for (const BitString& program : accepted) {
    auto outcome = machine::run(m, program, {1u << 10});
    if (const auto* h = std::get_if<machine::Halted>(&outcome)) {
      CHECK(h->bits_consumed == program.size());
      ++halted_count;
    }
  }
  CHECK(halted_count == 276);  // all but INC LOOP-BEGIN LOOP-END
}

TEST_CASE("constructed enumeration matches the brute-force scan, in order") {
  auto m = universal();
  std::vector<BitString> enumerated;
  auto tally = machine::for_each_valid_program(
      m, 14, [&](const BitString& program, const machine::Program* decoded) {
        REQUIRE(decoded != nullptr);
        CHECK(decoded->length_bits() == program.size());
        enumerated.push_back(program);
        return true;
      });
  CHECK(enumerated == brute_force_valid(14));
  CHECK(tally.valid == 277);
  CHECK(tally.rejected == (8 - 6) + (64 - 37) + (512 - 234));
}

TEST_CASE("table enumeration yields keys in length-lex order") {
  auto m = three_program_table();
  std::vector<BitString> enumerated;
  auto tally = machine::for_each_valid_program(
      m, 6, [&](const BitString& program, const machine::Program* decoded) {
        CHECK(decoded == nullptr);
        enumerated.push_back(program);
        return true;
      });
  CHECK(enumerated == std::vector<BitString>{bs("0001"), bs("000001"), bs("000011")});
  CHECK(tally.valid == 3);
  CHECK(tally.rejected == 0);

  std::vector<BitString> short_only;
  machine::for_each_valid_program(m, 4, [&](const BitString& p, const machine::Program*) {
    short_only.push_back(p);
    return true;
  });
  CHECK(short_only == std::vector<BitString>{bs("0001")});
}

TEST_CASE("fuel monotonicity") {
  auto m = universal();
  machine::for_each_valid_program(
      m, 12, [&](const BitString& program, const machine::Program*) {
        auto at_three = machine::run(m, program, {3});
        if (const auto* h = std::get_if<machine::Halted>(&at_three)) {
          for (std::uint64_t fuel : {h->steps, h->steps + 1, h->steps + 17}) {
            auto again = machine::run(m, program, {fuel});
            const auto& h2 = expect_halted(again);
            CHECK(h2.steps == h->steps);
            CHECK(h2.output == h->output);
          }
        } else {
          for (std::uint64_t fuel : {1, 2}) {
            auto again = machine::run(m, program, {fuel});
            CHECK(std::holds_alternative<machine::Exhausted>(again));
          }
        }
        return true;
      });
}

TEST_CASE("execution logs are deterministic") {
  auto m = universal();
  auto log_once = [&] {
    std::ostringstream log;
    machine::for_each_valid_program(
        m, 12, [&](const BitString& program, const machine::Program*) {
          log << program.str() << " -> "
              << machine::outcome_str(machine::run(m, program, {64})) << '\n';
          return true;
        });
    return log.str();
  };
  CHECK(log_once() == log_once());
}

TEST_CASE("print_program emits its target") {
  auto m = universal();
  std::mt19937_64 rng(0x5eed0102);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = rng() % 9;
    BitString target;
    for (std::size_t i = 0; i < len; ++i) target.push_back(rng() & 1);
    const BitString program = machine::print_program(target);
    const auto& h = expect_halted(machine::run(m, program, {2 * len + 2}));
    CHECK(h.output == target);
  }
}

TEST_CASE("machine digests distinguish specs") {
  auto a = three_program_table();
  auto b = universal();
  machine::TableMachine other;
  other.programs[bs("0001")] = bs("0");  // same keys, different output
  other.programs[bs("000001")] = bs("10");
  other.programs[bs("000011")] = bs("11");
  Machine c(std::move(other));
  CHECK(a.digest() != b.digest());
  CHECK(a.digest() != c.digest());
  CHECK(a.digest() == three_program_table().digest());
}
