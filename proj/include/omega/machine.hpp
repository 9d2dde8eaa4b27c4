#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "omega/bits.hpp"

namespace omega::machine {

inline constexpr std::string_view kBitbfIsa = "bitbf-v1";

// bitbf-v1 opcodes, one per 3-bit group after the gamma-coded count.
enum class Op : std::uint8_t {
  Halt = 0,   // stop
  Inc = 1,    // current cell += 1
  Dec = 2,    // current cell -= 1, saturating at 0
  Left = 3,   // move head left
  Right = 4,  // move head right
  LoopBegin = 5,  // if cell == 0, jump past the matching LoopEnd
  LoopEnd = 6,    // if cell != 0, jump back to the matching LoopBegin
  Out = 7,    // append (cell mod 2) to the output string
};

const char* op_name(Op op);

// Decoded bitbf-v1 program: opcode list plus precomputed loop matches.
struct Program {
  std::vector<Op> ops;
  std::vector<std::uint32_t> match;  // per op; only meaningful for loop ops
  std::size_t header_bits = 0;

  std::size_t length_bits() const { return header_bits + 3 * ops.size(); }
};

struct InvalidProgram {
  enum class Reason { TruncatedHeader, TruncatedBody, TrailingBits, UnbalancedLoops };
  Reason reason;
  std::string detail;
};

const char* reason_name(InvalidProgram::Reason reason);

using DecodeResult = std::variant<Program, InvalidProgram>;

// Accepts exactly gamma(n) followed by n three-bit opcodes with balanced
// loops and nothing after. The gamma header is what makes the accepted
// set prefix-free.
DecodeResult decode_program(const bits::BitString& program);

// Serializes an opcode list back to program bits (gamma header + body).
bits::BitString encode_program(std::span<const Op> ops);

// Straight-line program (Inc/Out only, no loops) whose output is exactly
// target; used as an explicit complexity witness.
bits::BitString print_program(const bits::BitString& target);

struct Halted {
  bits::BitString output;
  std::uint64_t steps = 0;
  std::size_t bits_consumed = 0;
};
struct Exhausted {
  std::uint64_t fuel = 0;
};
struct Invalid {
  std::string reason;
};

// Halted means the full program was consumed; Exhausted is agnostic about
// eventual halting; Invalid marks a non-program.
using RunOutcome = std::variant<Halted, Exhausted, Invalid>;

bool halted(const RunOutcome& outcome);
std::string outcome_str(const RunOutcome& outcome);

struct ExecConfig {
  std::uint64_t fuel = 256;  // maximum step count, >= 1
};

struct TableMachine {
  // Keys are the valid programs; map order is length-lex.
  std::map<bits::BitString, bits::BitString> programs;
};

struct UniversalMachine {
  std::string isa{kBitbfIsa};
};

struct TableValidation {
  bits::PrefixCheck check;
  bits::DyadicRational kraft;
  bool complete_boundary = false;  // kraft == 1: "not much of a computer"

  bool ok() const { return check.ok(); }
};

// Prefix-freeness verdict plus the Kraft sum and the sum-equals-1 flag.
TableValidation validate_table(const TableMachine& table);

class Machine {
 public:
  explicit Machine(TableMachine table);
  explicit Machine(UniversalMachine universal);

  // Machine spec file, format 1:
  //   {"format":1,"type":"table","programs":[{"bits":"0001","output":"1"},...]}
  //   {"format":1,"type":"universal","isa":"bitbf-v1"}
  // Unknown fields and unknown ISA identifiers are rejected; table keys
  // must form a nonempty prefix-free set. "output" defaults to "".
  static Machine load_file(const std::filesystem::path& path);
  static Machine parse_spec(const std::string& text, const std::string& origin);

  bool is_table() const { return std::holds_alternative<TableMachine>(spec_); }
  bool is_universal() const { return !is_table(); }
  const TableMachine& table() const { return std::get<TableMachine>(spec_); }

  // Canonical description line(s) fed to the digest.
  std::string canonical_description() const;
  std::uint64_t digest() const;

 private:
  std::variant<TableMachine, UniversalMachine> spec_;
};

// Deterministic fuel-bounded execution. Table machines answer in one step;
// the universal machine decodes and interprets bitbf-v1.
RunOutcome run(const Machine& machine, const bits::BitString& program,
               const ExecConfig& config = {});

// Interpreter entry for an already-decoded program.
RunOutcome run_decoded(const Program& program, const ExecConfig& config);

struct EnumTally {
  std::uint64_t valid = 0;     // valid programs seen
  std::uint64_t rejected = 0;  // candidates discarded (unbalanced loop bodies)
};

// Calls fn for every valid program of length <= max_bits in length-lex
// order. For table machines these are the keys; for the universal machine,
// candidates are generated header-first so only balanced bodies survive.
// decoded is non-null only for universal programs. Returning false stops
// the enumeration early.
EnumTally for_each_valid_program(
    const Machine& machine, std::size_t max_bits,
    const std::function<bool(const bits::BitString&, const Program* decoded)>& fn);

}  // namespace omega::machine
