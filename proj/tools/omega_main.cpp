// omega: halting-probability experiments on finite table machines and the
// bitbf-v1 reference universal machine. All numeric results print exactly
// (dyadic fractions and binary expansions), never as floating point.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "omega/bits.hpp"
#include "omega/digest.hpp"
#include "omega/enumerate.hpp"
#include "omega/errors.hpp"
#include "omega/machine.hpp"
#include "omega/oracle.hpp"

namespace {

using json = nlohmann::ordered_json;
using omega::bits::BitString;
using omega::bits::DyadicRational;

struct CommonOpts {
  std::string machine_path;
  std::string format = "text";

  bool structured() const { return format == "structured"; }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--machine", opts.machine_path, "machine spec file (JSON)")
      ->required();
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->default_val("text");
}

omega::machine::Machine load_machine(const CommonOpts& opts) {
  return omega::machine::Machine::load_file(opts.machine_path);
}

// Exact rendering used by table results: enough digits for the scale and
// for the longest program, so the per-program contributions line up.
std::string table_omega_line(const DyadicRational& value,
                             const omega::machine::TableMachine& table) {
  std::size_t max_len = 1;
  for (const auto& [key, output] : table.programs) {
    max_len = std::max(max_len, key.size());
  }
  return value.fraction_str() + " = " + value.binary_str(max_len);
}

json stage_to_json(const omega::enumerate::StageReport& report) {
  json doc;
  doc["stage"] = report.stage;
  json newly = json::array();
  for (const auto& record : report.newly_halted) {
    json entry;
    entry["program"] = record.program.str();
    entry["output"] = record.output.str();
    entry["steps"] = record.steps;
    newly.push_back(std::move(entry));
  }
  doc["newly_halted"] = std::move(newly);
  doc["omega_lower"] = report.omega_lower.fraction_str();
  doc["omega_lower_binary"] = report.omega_lower.binary_str();
  doc["cumulative_halted"] = report.cumulative_halted;
  doc["valid_programs"] = report.valid_programs;
  doc["rejected_candidates"] = report.rejected_candidates;
  doc["state_digest"] = omega::hex16(report.state_digest);
  return doc;
}

void print_stage_text(const omega::enumerate::StageReport& report) {
  std::cout << "stage " << report.stage << ": newly_halted=" << report.newly_halted.size()
            << " [";
  for (std::size_t i = 0; i < report.newly_halted.size(); ++i) {
    if (i > 0) std::cout << ' ';
    std::cout << report.newly_halted[i].program.str();
  }
  std::cout << "] omega_lower=" << report.omega_lower.fraction_str() << " = "
            << report.omega_lower.binary_str()
            << " cumulative=" << report.cumulative_halted
            << " valid=" << report.valid_programs
            << " rejected=" << report.rejected_candidates
            << " digest=" << omega::hex16(report.state_digest) << '\n';
}

int cmd_run(const CommonOpts& opts, const std::string& program_text,
            std::uint64_t fuel) {
  auto machine = load_machine(opts);
  BitString program = BitString::parse(program_text);
  omega::machine::RunOutcome outcome = omega::machine::run(machine, program, {fuel});
  if (opts.structured()) {
    json doc;
    if (const auto* h = std::get_if<omega::machine::Halted>(&outcome)) {
      doc["outcome"] = "halted";
      doc["output"] = h->output.str();
      doc["steps"] = h->steps;
      doc["bits_consumed"] = h->bits_consumed;
    } else if (const auto* e = std::get_if<omega::machine::Exhausted>(&outcome)) {
      doc["outcome"] = "exhausted";
      doc["fuel"] = e->fuel;
    } else {
      doc["outcome"] = "invalid";
      doc["reason"] = std::get<omega::machine::Invalid>(outcome).reason;
    }
    std::cout << doc.dump() << '\n';
  } else {
    std::cout << omega::machine::outcome_str(outcome) << '\n';
  }
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  // Load-time validation throws; reaching this point means the spec is sound.
  auto machine = load_machine(opts);
  if (machine.is_table()) {
    auto validation = omega::machine::validate_table(machine.table());
    if (opts.structured()) {
      json doc;
      doc["ok"] = true;
      doc["type"] = "table";
      doc["programs"] = machine.table().programs.size();
      doc["kraft"] = validation.kraft.fraction_str();
      doc["kraft_binary"] = validation.kraft.binary_str();
      doc["complete_boundary"] = validation.complete_boundary;
      std::cout << doc.dump() << '\n';
    } else {
      std::cout << "ok: prefix-free table with " << machine.table().programs.size()
                << " program(s)\n";
      std::cout << "kraft " << validation.kraft.fraction_str() << " = "
                << validation.kraft.binary_str() << '\n';
      if (validation.complete_boundary) {
        std::cout << "boundary: kraft sum is 1 — the code is complete; no further "
                     "program can ever halt\n";
      }
    }
  } else {
    if (opts.structured()) {
      json doc;
      doc["ok"] = true;
      doc["type"] = "universal";
      doc["isa"] = std::string(omega::machine::kBitbfIsa);
      std::cout << doc.dump() << '\n';
    } else {
      std::cout << "ok: universal machine, isa " << omega::machine::kBitbfIsa << '\n';
    }
  }
  return 0;
}

int cmd_kraft(const CommonOpts& opts) {
  auto machine = load_machine(opts);
  if (!machine.is_table()) {
    throw omega::ValidationError(
        "kraft needs the finite program set of a table machine");
  }
  auto validation = omega::machine::validate_table(machine.table());
  if (opts.structured()) {
    json doc;
    doc["kraft"] = validation.kraft.fraction_str();
    doc["kraft_binary"] = validation.kraft.binary_str();
    doc["complete_boundary"] = validation.complete_boundary;
    std::cout << doc.dump() << '\n';
  } else {
    std::cout << table_omega_line(validation.kraft, machine.table()) << '\n';
    if (validation.complete_boundary) {
      std::cout << "boundary: kraft sum is 1 — complete code\n";
    }
  }
  return 0;
}

int cmd_omega_exact(const CommonOpts& opts) {
  auto machine = load_machine(opts);
  DyadicRational value = omega::enumerate::exact_omega(machine);
  auto validation = omega::machine::validate_table(machine.table());
  if (validation.complete_boundary) {
    std::cerr << "warning: kraft sum is 1 — a complete code is only good for "
                 "running these programs\n";
  }
  if (opts.structured()) {
    json doc;
    doc["omega"] = value.fraction_str();
    doc["omega_binary"] = value.binary_str();
    doc["complete_boundary"] = validation.complete_boundary;
    std::cout << doc.dump() << '\n';
  } else {
    std::cout << table_omega_line(value, machine.table()) << '\n';
  }
  return 0;
}

int cmd_omega_stages(const CommonOpts& opts, std::uint32_t stages,
                     const std::string& checkpoint_path) {
  auto machine = load_machine(opts);
  std::optional<std::filesystem::path> checkpoint;
  if (!checkpoint_path.empty()) checkpoint = checkpoint_path;
  const auto started = std::chrono::steady_clock::now();
  omega::enumerate::omega_stages_stream(
      machine, stages, checkpoint, [&](const omega::enumerate::StageReport& report) {
        if (opts.structured()) {
          std::cout << stage_to_json(report).dump() << '\n';
        } else {
          print_stage_text(report);
        }
      });
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  std::cerr << "omega-stages: " << elapsed.count() << " ms\n";
  return 0;
}

int cmd_oracle(const CommonOpts& opts, const std::string& bits_text,
               std::uint32_t ceiling) {
  auto machine = load_machine(opts);
  BitString omega_bits = BitString::parse(bits_text);
  auto report = omega::oracle::halting_from_omega_prefix(machine, omega_bits, ceiling);
  if (opts.structured()) {
    json doc;
    doc["prefix"] = omega_bits.str();
    doc["n"] = report.prefix_bits;
    doc["prefix_value"] = report.prefix_value.fraction_str();
    doc["threshold_crossed"] = report.threshold_crossed;
    doc["crossing_stage"] = report.crossing_stage;
    doc["stages_run"] = report.stages_run;
    doc["omega_lower"] = report.omega_lower.fraction_str();
    json verdicts = json::array();
    for (const auto& [program, verdict] : report.program_verdicts) {
      json entry;
      entry["program"] = program.str();
      entry["verdict"] = omega::oracle::verdict_name(verdict);
      verdicts.push_back(std::move(entry));
    }
    doc["verdicts"] = std::move(verdicts);
    std::cout << doc.dump() << '\n';
  } else {
    std::cout << "prefix " << omega_bits.str() << " (N=" << report.prefix_bits
              << ") value " << report.prefix_value.fraction_str() << '\n';
    if (report.threshold_crossed) {
      std::cout << "threshold crossed at stage " << report.crossing_stage
                << "; omega lower bound " << report.omega_lower.fraction_str()
                << " = " << report.omega_lower.binary_str() << '\n';
    } else {
      std::cout << "threshold not reached within stage ceiling " << ceiling
                << "; omega lower bound " << report.omega_lower.fraction_str()
                << " — verdicts below are undetermined where unresolved\n";
    }
    std::size_t halts = 0, never = 0, undetermined = 0;
    for (const auto& [program, verdict] : report.program_verdicts) {
      std::cout << program.str() << ' ' << omega::oracle::verdict_name(verdict)
                << '\n';
      switch (verdict) {
        case omega::oracle::Verdict::Halts: ++halts; break;
        case omega::oracle::Verdict::NeverHalts: ++never; break;
        case omega::oracle::Verdict::Undetermined: ++undetermined; break;
      }
    }
    std::cout << "valid programs up to " << report.prefix_bits
              << " bits: halts=" << halts << " never_halts=" << never
              << " undetermined=" << undetermined << '\n';
  }
  return 0;
}

int cmd_complexity(const CommonOpts& opts, const std::string& target_text,
                   std::size_t max_size, std::uint64_t fuel) {
  auto machine = load_machine(opts);
  BitString target = BitString::parse(target_text);
  auto bound = omega::oracle::complexity_upper(machine, target, max_size, fuel);
  if (opts.structured()) {
    json doc;
    doc["target"] = target.str();
    doc["size_bound"] = max_size;
    doc["exact"] = bound.exact;
    if (bound.bits) {
      doc["bits"] = *bound.bits;
      doc["witness"] = bound.witness->program.str();
      doc["witness_output"] = bound.witness->output.str();
      doc["witness_steps"] = bound.witness->steps;
    } else {
      doc["bits"] = nullptr;
    }
    doc["exhausted_candidates"] = bound.exhausted_candidates;
    if (!bound.note.empty()) doc["note"] = bound.note;
    std::cout << doc.dump() << '\n';
  } else {
    if (bound.bits) {
      std::cout << "complexity of " << target.str() << " <= " << *bound.bits
                << " bits (" << (bound.exact ? "exact" : "upper bound") << ")\n";
      std::cout << "witness " << bound.witness->program.str() << " halts in "
                << bound.witness->steps << " step(s) with output "
                << bound.witness->output.str() << '\n';
    } else {
      std::cout << "no program of at most " << max_size << " bits outputs "
                << target.str() << (bound.exact ? " (exact)" : " (upper bound)")
                << '\n';
    }
    if (!bound.note.empty()) std::cout << bound.note << '\n';
  }
  return 0;
}

int cmd_berry(const CommonOpts& opts, std::uint32_t n, std::uint32_t multiplier,
              std::uint64_t fuel, const std::string& decider_spec) {
  auto machine = load_machine(opts);
  omega::oracle::BerryOutcome outcome;
  if (decider_spec.empty()) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n) * multiplier;
    outcome = omega::oracle::first_complex_integer(
        machine, static_cast<std::size_t>(bound), fuel);
  } else {
    std::unique_ptr<omega::oracle::Decider> decider;
    if (std::filesystem::exists(decider_spec)) {
      decider = std::make_unique<omega::oracle::VerdictFileDecider>(decider_spec);
    } else {
      decider = std::make_unique<omega::oracle::SubprocessDecider>(decider_spec);
    }
    outcome = omega::oracle::berry_demo(machine, *decider, n, multiplier, fuel);
  }
  if (opts.structured()) {
    json doc;
    doc["bound_bits"] = outcome.bound_bits;
    doc["integer_found"] = outcome.integer_found.str();
    doc["produced_count"] = outcome.produced_count;
    json audit = json::array();
    for (const auto& entry : outcome.audit) {
      json item;
      item["program"] = entry.program.str();
      if (entry.claimed) {
        item["claimed"] = omega::oracle::verdict_name(*entry.claimed);
      }
      item["observed"] = entry.observed_halt ? "halted" : "exhausted";
      if (entry.observed) item["output"] = entry.observed->output.str();
      item["contradiction"] = entry.contradiction;
      audit.push_back(std::move(item));
    }
    doc["audit"] = std::move(audit);
    std::cout << doc.dump() << '\n';
  } else {
    std::cout << "searched valid programs up to " << outcome.bound_bits
              << " bits; " << outcome.produced_count
              << " integer image(s) produced\n";
    std::cout << "first integer not produced: " << outcome.integer_found << '\n';
    const auto contradictions = outcome.contradictions();
    if (!decider_spec.empty()) {
      std::cout << "contradictions: " << contradictions.size() << '\n';
      for (const auto* entry : contradictions) {
        if (entry->claimed == omega::oracle::Verdict::Halts) {
          std::cout << "  claimed halts, ran out of fuel: " << entry->program.str()
                    << '\n';
        } else {
          std::cout << "  claimed never_halts, halted with output "
                    << entry->observed->output.str() << ": " << entry->program.str()
                    << '\n';
        }
      }
    } else if (!outcome.audit.empty()) {
      std::cout << "fuel-exhausted programs (could invalidate the answer): "
                << outcome.audit.size() << '\n';
      for (const auto& entry : outcome.audit) {
        std::cout << "  " << entry.program.str() << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "omega — exact halting probabilities, staged lower bounds, and "
      "halting-oracle constructions for finite and toy universal machines"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  std::string run_program;
  std::uint64_t run_fuel = 256;
  auto* run_cmd = app.add_subcommand("run", "run one program, fuel-bounded");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--program", run_program, "program bits")->required();
  run_cmd->add_option("--fuel", run_fuel, "maximum step count")->default_val(256);

  CommonOpts validate_opts;
  auto* validate_cmd =
      app.add_subcommand("validate", "check a machine spec (prefix-freeness, kraft)");
  add_common(validate_cmd, validate_opts);

  CommonOpts kraft_opts;
  auto* kraft_cmd = app.add_subcommand("kraft", "kraft sum of a table machine");
  add_common(kraft_cmd, kraft_opts);

  CommonOpts exact_opts;
  auto* exact_cmd =
      app.add_subcommand("omega-exact", "exact halting probability of a table machine");
  add_common(exact_cmd, exact_opts);

  CommonOpts stages_opts;
  std::uint32_t stages = 0;
  std::string checkpoint_path;
  auto* stages_cmd = app.add_subcommand(
      "omega-stages", "staged lower bounds: run every program up to K bits for K steps");
  add_common(stages_cmd, stages_opts);
  stages_cmd->add_option("--stages", stages, "number of stages K")->required();
  stages_cmd->add_option("--checkpoint", checkpoint_path,
                         "checkpoint file for interrupt/resume");

  CommonOpts oracle_opts;
  std::string oracle_bits;
  std::uint32_t oracle_ceiling = 16;
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "decide halting for short programs from an omega prefix");
  add_common(oracle_cmd, oracle_opts);
  oracle_cmd->add_option("--bits", oracle_bits, "claimed first N bits of omega")
      ->required();
  oracle_cmd->add_option("--fuel", oracle_ceiling, "stage ceiling")->default_val(16);

  CommonOpts complexity_opts;
  std::string target_text;
  std::size_t max_size = 0;
  std::uint64_t complexity_fuel = 256;
  auto* complexity_cmd = app.add_subcommand(
      "complexity", "smallest fuel-bounded program producing a target string");
  add_common(complexity_cmd, complexity_opts);
  complexity_cmd->add_option("--target", target_text, "target output bits")
      ->required();
  complexity_cmd->add_option("--max-size", max_size, "program size bound in bits")
      ->required();
  complexity_cmd->add_option("--fuel", complexity_fuel, "steps per program")
      ->default_val(256);

  CommonOpts berry_opts;
  std::uint32_t berry_n = 0;
  std::uint32_t berry_multiplier = 100;
  std::uint64_t berry_fuel = 256;
  std::string decider_spec;
  auto* berry_cmd = app.add_subcommand(
      "berry", "first integer whose complexity exceeds multiplier*n bits");
  add_common(berry_cmd, berry_opts);
  berry_cmd->add_option("--n", berry_n, "size parameter N")->required();
  berry_cmd->add_option("--multiplier", berry_multiplier, "bound multiplier")
      ->default_val(100);
  berry_cmd->add_option("--fuel", berry_fuel, "steps per program")->default_val(256);
  berry_cmd->add_option("--decider", decider_spec,
                        "halting decider: verdict file path or subprocess command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, run_program, run_fuel);
    if (validate_cmd->parsed()) return cmd_validate(validate_opts);
    if (kraft_cmd->parsed()) return cmd_kraft(kraft_opts);
    if (exact_cmd->parsed()) return cmd_omega_exact(exact_opts);
    if (stages_cmd->parsed())
      return cmd_omega_stages(stages_opts, stages, checkpoint_path);
    if (oracle_cmd->parsed())
      return cmd_oracle(oracle_opts, oracle_bits, oracle_ceiling);
    if (complexity_cmd->parsed())
      return cmd_complexity(complexity_opts, target_text, max_size, complexity_fuel);
    if (berry_cmd->parsed())
      return cmd_berry(berry_opts, berry_n, berry_multiplier, berry_fuel,
                       decider_spec);
  } catch (const omega::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
