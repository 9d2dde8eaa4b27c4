#include "omega/oracle.hpp"

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace omega::oracle {

using bits::BigInt;
using bits::BitString;
using bits::DyadicRational;

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Halts: return "halts";
    case Verdict::NeverHalts: return "never_halts";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

namespace {

bool is_valid_program(const machine::Machine& machine, const BitString& s) {
  if (machine.is_table()) return machine.table().programs.count(s) != 0;
  return std::holds_alternative<machine::Program>(machine::decode_program(s));
}

}  // namespace

Verdict OracleReport::classify(const machine::Machine& machine,
                               const BitString& s) const {
  if (s.size() > prefix_bits) {
    throw ValidationError("oracle verdicts cover programs up to " +
                          std::to_string(prefix_bits) + " bits, asked about " +
                          std::to_string(s.size()));
  }
  if (discovered.contains(s)) return Verdict::Halts;
  if (!is_valid_program(machine, s)) return Verdict::NeverHalts;  // non-program
  return threshold_crossed ? Verdict::NeverHalts : Verdict::Undetermined;
}

OracleReport halting_from_omega_prefix(const machine::Machine& machine,
                                       const BitString& omega_bits,
                                       std::uint32_t stage_ceiling,
                                       const enumerate::StageConfig& config) {
  if (omega_bits.empty()) {
    throw ValidationError("need at least one omega bit (N >= 1)");
  }
  if (omega_bits.size() > config.max_length) {
    throw ValidationError("omega prefix longer than the configured maximum length");
  }
  if (stage_ceiling > config.max_length) {
    throw ValidationError("stage ceiling exceeds the configured maximum length");
  }

  OracleReport report;
  report.prefix_bits = static_cast<std::uint32_t>(omega_bits.size());
  report.prefix_value = bits::value_of_expansion(omega_bits);
  const DyadicRational overshoot =
      report.prefix_value + DyadicRational::half_power(omega_bits.size());

  enumerate::HaltedSet cumulative;
  // value 0 needs no stages: an undiscovered halter would already overshoot.
  if (cumulative.omega_lower() >= report.prefix_value) {
    report.threshold_crossed = true;
    report.crossing_stage = 0;
  } else {
    for (std::uint32_t stage = 1; stage <= stage_ceiling; ++stage) {
      enumerate::StageReport sr = stage_run(machine, stage, cumulative, config);
      report.stages_run = stage;
      if (sr.omega_lower >= overshoot) {
        throw InconsistentOmegaBits(
            "stage " + std::to_string(stage) + " lower bound " +
            sr.omega_lower.fraction_str() + " reached " + overshoot.fraction_str() +
            " = value + 2^-" + std::to_string(omega_bits.size()) +
            "; the supplied bits cannot be the first " +
            std::to_string(omega_bits.size()) + " bits of this machine's omega");
      }
      if (sr.omega_lower >= report.prefix_value) {
        report.threshold_crossed = true;
        report.crossing_stage = stage;
        break;
      }
    }
  }
  report.omega_lower = cumulative.omega_lower();
  report.discovered = std::move(cumulative);

  machine::for_each_valid_program(
      machine, omega_bits.size(),
      [&](const BitString& program, const machine::Program*) {
        Verdict verdict = report.discovered.contains(program)
                              ? Verdict::Halts
                              : (report.threshold_crossed ? Verdict::NeverHalts
                                                          : Verdict::Undetermined);
        report.program_verdicts.emplace_back(program, verdict);
        return true;
      });
  return report;
}

ComplexityBound complexity_upper(const machine::Machine& machine,
                                 const BitString& target, std::size_t size_bound,
                                 std::uint64_t fuel,
                                 const enumerate::StageConfig& config) {
  if (size_bound > config.max_length) {
    throw ValidationError("size bound exceeds the configured maximum length");
  }
  ComplexityBound result;
  result.target = target;
  const machine::ExecConfig exec{fuel};
  machine::for_each_valid_program(
      machine, size_bound,
      [&](const BitString& program, const machine::Program* decoded) {
        // Programs longer than a found witness cannot improve the bound,
        // but the rest of the witness's length class still decides
        // whether the bound is exact.
        if (result.witness && program.size() > result.witness->program.size()) {
          return false;
        }
        machine::RunOutcome outcome = decoded != nullptr
                                          ? machine::run_decoded(*decoded, exec)
                                          : machine::run(machine, program, exec);
        if (std::holds_alternative<machine::Exhausted>(outcome)) {
          ++result.exhausted_candidates;
          return true;
        }
        if (const auto* h = std::get_if<machine::Halted>(&outcome)) {
          if (!result.witness && h->output == target) {
            result.witness = enumerate::HaltRecord{program, h->output, h->steps};
            result.bits = program.size();
          }
        }
        return true;
      });
  result.exact = result.exhausted_candidates == 0;
  if (!result.witness) {
    result.note = result.exact
                      ? "no program of at most " + std::to_string(size_bound) +
                            " bits outputs the target; none ran out of fuel, so "
                            "none exists within this size bound"
                      : "no producer found within " + std::to_string(size_bound) +
                            " bits, but " +
                            std::to_string(result.exhausted_candidates) +
                            " program(s) ran out of fuel and might still halt";
  } else if (!result.exact) {
    result.note = std::to_string(result.exhausted_candidates) +
                  " program(s) of at most " +
                  std::to_string(result.witness->program.size()) +
                  " bits ran out of fuel; a slower, smaller producer may exist";
  }
  return result;
}

std::vector<const AuditEntry*> BerryOutcome::contradictions() const {
  std::vector<const AuditEntry*> out;
  for (const AuditEntry& entry : audit) {
    if (entry.contradiction) out.push_back(&entry);
  }
  return out;
}

namespace {

BigInt least_positive_missing(const std::set<BigInt>& produced) {
  BigInt candidate = 1;
  while (produced.count(candidate) != 0) ++candidate;
  return candidate;
}

}  // namespace

BerryOutcome first_complex_integer(const machine::Machine& machine,
                                   std::size_t bound_bits, std::uint64_t fuel,
                                   const enumerate::StageConfig& config) {
  if (bound_bits > config.max_length) {
    throw ValidationError("size bound exceeds the configured maximum length");
  }
  BerryOutcome outcome;
  outcome.size_param = static_cast<std::uint32_t>(bound_bits);
  outcome.multiplier = 0;
  outcome.bound_bits = bound_bits;
  std::set<BigInt> produced;
  const machine::ExecConfig exec{fuel};
  machine::for_each_valid_program(
      machine, bound_bits,
      [&](const BitString& program, const machine::Program* decoded) {
        machine::RunOutcome run_outcome =
            decoded != nullptr ? machine::run_decoded(*decoded, exec)
                               : machine::run(machine, program, exec);
        if (const auto* h = std::get_if<machine::Halted>(&run_outcome)) {
          produced.insert(bits::index_of(h->output));
        } else if (std::holds_alternative<machine::Exhausted>(run_outcome)) {
          AuditEntry entry;
          entry.program = program;
          outcome.audit.push_back(std::move(entry));
        }
        return true;
      });
  outcome.produced_count = produced.size();
  outcome.integer_found = least_positive_missing(produced);
  return outcome;
}

BerryOutcome berry_demo(const machine::Machine& machine, Decider& decider,
                        std::uint32_t n, std::uint32_t multiplier,
                        std::uint64_t fuel, const enumerate::StageConfig& config) {
  if (n == 0 || multiplier == 0) {
    throw ValidationError("berry construction needs n >= 1 and multiplier >= 1");
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(n) * multiplier;
  if (bound > config.max_length) {
    throw ValidationError("bound " + std::to_string(bound) + " = " +
                          std::to_string(multiplier) + " * " + std::to_string(n) +
                          " exceeds the configured maximum length " +
                          std::to_string(config.max_length));
  }
  BerryOutcome outcome;
  outcome.size_param = n;
  outcome.multiplier = multiplier;
  outcome.bound_bits = static_cast<std::size_t>(bound);
  std::set<BigInt> produced;
  const machine::ExecConfig exec{fuel};
  machine::for_each_valid_program(
      machine, outcome.bound_bits,
      [&](const BitString& program, const machine::Program* decoded) {
        const bool claimed_halts = decider.halts(program);
        machine::RunOutcome run_outcome =
            decoded != nullptr ? machine::run_decoded(*decoded, exec)
                               : machine::run(machine, program, exec);
        const auto* h = std::get_if<machine::Halted>(&run_outcome);
        if (claimed_halts) {
          if (h != nullptr) {
            produced.insert(bits::index_of(h->output));
          } else {
            // Claimed halter that outlived the fuel: flagged, not produced.
            AuditEntry entry;
            entry.program = program;
            entry.claimed = Verdict::Halts;
            entry.contradiction = true;
            outcome.audit.push_back(std::move(entry));
          }
        } else if (h != nullptr) {
          AuditEntry entry;
          entry.program = program;
          entry.claimed = Verdict::NeverHalts;
          entry.observed_halt = true;
          entry.observed = enumerate::HaltRecord{program, h->output, h->steps};
          entry.contradiction = true;
          outcome.audit.push_back(std::move(entry));
        }
        return true;
      });
  outcome.produced_count = produced.size();
  outcome.integer_found = least_positive_missing(produced);
  return outcome;
}

TableDecider::TableDecider(const machine::Machine& machine) : machine_(&machine) {
  if (!machine.is_table()) {
    throw ValidationError("an exact decider can only be derived from a table machine");
  }
}

bool TableDecider::halts(const BitString& program) {
  return machine_->table().programs.count(program) != 0;
}

StepBoundDecider::StepBoundDecider(const machine::Machine& machine,
                                   std::uint64_t step_bound)
    : machine_(&machine), step_bound_(step_bound) {
  if (step_bound_ == 0) throw ValidationError("step bound must be at least 1");
}

bool StepBoundDecider::halts(const BitString& program) {
  return machine::halted(machine::run(*machine_, program, {step_bound_}));
}

VerdictFileDecider::VerdictFileDecider(const std::filesystem::path& path)
    : origin_(path.string()) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open verdict file: " + origin_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string program_text, answer;
    fields >> program_text >> answer;
    if (program_text.empty() || (answer != "YES" && answer != "NO")) {
      throw LoadError(origin_ + ":" + std::to_string(line_no) +
                      ": expected \"<bits> YES|NO\"");
    }
    verdicts_[BitString::parse(program_text)] = (answer == "YES");
  }
}

bool VerdictFileDecider::halts(const BitString& program) {
  auto it = verdicts_.find(program);
  if (it == verdicts_.end()) {
    throw ProtocolError(origin_ + " has no verdict for program " + program.str());
  }
  return it->second;
}

SubprocessDecider::SubprocessDecider(const std::string& command)
    : command_(command) {
  // A dead child must surface as a protocol error, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw Error("cannot create decider pipes");
  }
  pid_t pid = fork();
  if (pid < 0) throw Error("cannot fork decider subprocess");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  child_pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = fdopen(from_child[0], "r");
  if (from_child_ == nullptr) throw Error("cannot open decider output stream");
}

SubprocessDecider::~SubprocessDecider() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ != nullptr) fclose(from_child_);
  if (child_pid_ > 0) {
    int status = 0;
    waitpid(child_pid_, &status, 0);
  }
}

bool SubprocessDecider::halts(const BitString& program) {
  const std::string request = "HALTS? " + program.str() + "\n";
  ssize_t written = write(to_child_, request.data(), request.size());
  if (written != static_cast<ssize_t>(request.size())) {
    throw ProtocolError("decider \"" + command_ + "\" stopped accepting queries");
  }
  char* line = nullptr;
  size_t capacity = 0;
  ssize_t length = getline(&line, &capacity, from_child_);
  std::string answer;
  if (length > 0) {
    answer.assign(line, static_cast<std::size_t>(length));
    while (!answer.empty() && (answer.back() == '\n' || answer.back() == '\r')) {
      answer.pop_back();
    }
  }
  free(line);
  if (answer == "YES") return true;
  if (answer == "NO") return false;
  throw ProtocolError("decider \"" + command_ + "\" answered \"" + answer +
                      "\" to HALTS? " + program.str());
}

}  // namespace omega::oracle
