#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omega/bits.hpp"
#include "omega/machine.hpp"

namespace omega::enumerate {

struct HaltRecord {
  bits::BitString program;
  bits::BitString output;
  std::uint64_t steps = 0;
};

// Cumulative set of discovered halting programs, length-lex ordered, with
// the running Kraft sum (the omega lower bound) kept alongside.
class HaltedSet {
 public:
  bool contains(const bits::BitString& program) const {
    return records_.count(program) != 0;
  }
  void insert(HaltRecord record);

  const bits::DyadicRational& omega_lower() const { return omega_lower_; }
  std::size_t size() const { return records_.size(); }

  const std::map<bits::BitString, HaltRecord>& records() const { return records_; }

  // FNV-1a 64 over "<program bits>\n" for each member in length-lex order.
  std::uint64_t digest() const;

 private:
  std::map<bits::BitString, HaltRecord> records_;
  bits::DyadicRational omega_lower_;
};

struct StageConfig {
  std::size_t max_length = bits::kDefaultMaxLength;
};

struct StageReport {
  std::uint32_t stage = 0;
  std::vector<HaltRecord> newly_halted;  // length-lex order
  bits::DyadicRational omega_lower;      // cumulative after this stage
  std::uint64_t cumulative_halted = 0;
  std::uint64_t valid_programs = 0;       // valid programs of length <= stage
  std::uint64_t rejected_candidates = 0;  // unbalanced bodies discarded
  std::uint64_t state_digest = 0;
};

// Stage K of the dovetailer: run every valid program of length <= K not
// already known to halt, with fuel K, and fold discoveries into cumulative.
StageReport stage_run(const machine::Machine& machine, std::uint32_t stage,
                      HaltedSet& cumulative, const StageConfig& config = {});

// Resumable stage capture: format 1 JSON with the machine digest, the last
// completed stage, and the full halted set. Writes are write-then-rename.
struct Checkpoint {
  static constexpr int kFormat = 1;

  std::string machine_digest;  // hex16 of Machine::digest()
  std::uint32_t last_stage = 0;
  HaltedSet halted;

  static Checkpoint load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

// Stages 1..k_max (or resumed_from+1..k_max when a checkpoint exists),
// invoking on_report per stage. With a checkpoint path, progress is saved
// after every stage; a digest mismatch with the machine refuses to resume.
void omega_stages_stream(const machine::Machine& machine, std::uint32_t k_max,
                         const std::optional<std::filesystem::path>& checkpoint,
                         const std::function<void(const StageReport&)>& on_report,
                         const StageConfig& config = {});

std::vector<StageReport> omega_stages(
    const machine::Machine& machine, std::uint32_t k_max,
    const std::optional<std::filesystem::path>& checkpoint = {},
    const StageConfig& config = {});

// Kraft sum of all table keys — exact. Throws ValidationError for the
// universal machine: its exact halting probability is uncomputable.
bits::DyadicRational exact_omega(const machine::Machine& machine);

}  // namespace omega::enumerate
