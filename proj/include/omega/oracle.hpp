#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "omega/bits.hpp"
#include "omega/enumerate.hpp"
#include "omega/machine.hpp"

namespace omega::oracle {

enum class Verdict { Halts, NeverHalts, Undetermined };

const char* verdict_name(Verdict verdict);

// Raised when staged lower bounds overshoot value(omega_bits) + 2^-N:
// lower bounds can never exceed the true omega, so the supplied bits are
// provably not its first N bits.
class InconsistentOmegaBits : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct OracleReport {
  std::uint32_t prefix_bits = 0;           // N
  bits::DyadicRational prefix_value;       // truncation sum of the given bits
  bool threshold_crossed = false;
  std::uint32_t crossing_stage = 0;        // K*, meaningful when crossed
  std::uint32_t stages_run = 0;
  bits::DyadicRational omega_lower;        // final stage lower bound
  enumerate::HaltedSet discovered;         // all halters seen, any length
  // Valid programs of length <= N, length-lex, with their verdicts.
  std::vector<std::pair<bits::BitString, Verdict>> program_verdicts;

  // Verdict for an arbitrary string of length <= N. Non-programs (table
  // non-keys, undecodable strings) never halt.
  Verdict classify(const machine::Machine& machine, const bits::BitString& s) const;
};

// Runs stages K = 1, 2, ... until the lower bound reaches value(omega_bits);
// then every undiscovered valid program of length <= N can never halt, or
// the bound would overshoot the true omega. Stops at stage_ceiling with
// Undetermined verdicts when the threshold is not reached; throws
// InconsistentOmegaBits when the bound reaches value + 2^-N.
OracleReport halting_from_omega_prefix(const machine::Machine& machine,
                                       const bits::BitString& omega_bits,
                                       std::uint32_t stage_ceiling,
                                       const enumerate::StageConfig& config = {});

struct ComplexityBound {
  bits::BitString target;
  bool exact = false;  // no fuel-exhausted program of size <= the bound survived
  std::optional<std::size_t> bits;  // nullopt: no producer within the size bound
  std::optional<enumerate::HaltRecord> witness;
  std::uint64_t exhausted_candidates = 0;  // fuel-exhausted programs counted
  std::string note;
};

// Smallest fuel-bounded halting program (length-lex) whose output equals
// target, over valid programs of at most size_bound bits. The bound is an
// upper bound unless no smaller-or-equal program ran out of fuel.
ComplexityBound complexity_upper(const machine::Machine& machine,
                                 const bits::BitString& target,
                                 std::size_t size_bound, std::uint64_t fuel,
                                 const enumerate::StageConfig& config = {});

// A claimed total halting decider; queries either answer or throw
// ProtocolError.
class Decider {
 public:
  virtual ~Decider() = default;
  virtual bool halts(const bits::BitString& program) = 0;
};

// Exact decider derived from a table machine: halts iff the string is a key.
class TableDecider : public Decider {
 public:
  explicit TableDecider(const machine::Machine& machine);
  bool halts(const bits::BitString& program) override;

 private:
  const machine::Machine* machine_;
};

// Heuristic: claims "halts" iff the program halts within step_bound steps.
class StepBoundDecider : public Decider {
 public:
  StepBoundDecider(const machine::Machine& machine, std::uint64_t step_bound);
  bool halts(const bits::BitString& program) override;

 private:
  const machine::Machine* machine_;
  std::uint64_t step_bound_;
};

class ConstantDecider : public Decider {
 public:
  explicit ConstantDecider(bool answer) : answer_(answer) {}
  bool halts(const bits::BitString&) override { return answer_; }

 private:
  bool answer_;
};

// Static verdict file: one "<bits> YES|NO" per line, '#' comments allowed.
// A query not covered by the file is a protocol error.
class VerdictFileDecider : public Decider {
 public:
  explicit VerdictFileDecider(const std::filesystem::path& path);
  bool halts(const bits::BitString& program) override;

 private:
  std::map<bits::BitString, bool> verdicts_;
  std::string origin_;
};

// Line protocol over a subprocess: send "HALTS? <bits>", expect "YES"/"NO".
class SubprocessDecider : public Decider {
 public:
  explicit SubprocessDecider(const std::string& command);
  ~SubprocessDecider() override;
  SubprocessDecider(const SubprocessDecider&) = delete;
  SubprocessDecider& operator=(const SubprocessDecider&) = delete;

  bool halts(const bits::BitString& program) override;

 private:
  std::string command_;
  int child_pid_ = -1;
  int to_child_ = -1;
  FILE* from_child_ = nullptr;
};

struct AuditEntry {
  bits::BitString program;
  std::optional<Verdict> claimed;  // empty for plain fuel-exhaustion entries
  bool observed_halt = false;
  std::optional<enumerate::HaltRecord> observed;  // set when observed_halt
  bool contradiction = false;
};

struct BerryOutcome {
  std::uint32_t size_param = 0;   // N (bound M for the decider-free search)
  std::uint32_t multiplier = 0;   // 0 when no decider is involved
  std::size_t bound_bits = 0;     // M, the program-size bound searched
  bits::BigInt integer_found;     // least positive integer not produced
  std::uint64_t produced_count = 0;
  std::vector<AuditEntry> audit;

  std::vector<const AuditEntry*> contradictions() const;
};

// Fuel-bounded produced-integer set over all valid programs of at most
// bound_bits bits; returns the least positive integer outside it. The audit
// lists fuel-exhausted programs whose eventual halting could shrink the
// answer (always empty for table machines).
BerryOutcome first_complex_integer(const machine::Machine& machine,
                                   std::size_t bound_bits, std::uint64_t fuel,
                                   const enumerate::StageConfig& config = {});

// The reductio harness: trusts decider over all valid programs of at most
// multiplier*n bits, runs the claimed halters to collect outputs, and
// returns the least positive integer not produced. Every decider claim
// contradicted by execution is flagged in the audit.
BerryOutcome berry_demo(const machine::Machine& machine, Decider& decider,
                        std::uint32_t n, std::uint32_t multiplier,
                        std::uint64_t fuel,
                        const enumerate::StageConfig& config = {});

}  // namespace omega::oracle
