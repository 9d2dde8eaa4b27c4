#include "omega/enumerate.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omega/digest.hpp"

namespace omega::enumerate {

using bits::BitString;
using bits::DyadicRational;
using json = nlohmann::ordered_json;

void HaltedSet::insert(HaltRecord record) {
  const std::size_t length = record.program.size();
  if (records_.emplace(record.program, std::move(record)).second) {
    omega_lower_ += DyadicRational::half_power(length);
  }
}

std::uint64_t HaltedSet::digest() const {
  Fnv1a64 hash;
  for (const auto& [program, record] : records_) {
    hash.update(program.str());
    hash.update("\n");
  }
  return hash.value();
}

StageReport stage_run(const machine::Machine& machine, std::uint32_t stage,
                      HaltedSet& cumulative, const StageConfig& config) {
  if (stage == 0) throw ValidationError("stages are numbered from 1");
  if (stage > config.max_length) {
    throw ValidationError("stage " + std::to_string(stage) +
                          " exceeds the configured maximum program length " +
                          std::to_string(config.max_length));
  }
  StageReport report;
  report.stage = stage;
  const machine::ExecConfig exec{stage};  // fuel = K steps at stage K
  machine::EnumTally tally = machine::for_each_valid_program(
      machine, stage,
      [&](const BitString& program, const machine::Program* decoded) {
        if (cumulative.contains(program)) return true;
        machine::RunOutcome outcome = decoded != nullptr
                                          ? machine::run_decoded(*decoded, exec)
                                          : machine::run(machine, program, exec);
        if (const auto* h = std::get_if<machine::Halted>(&outcome)) {
          HaltRecord record{program, h->output, h->steps};
          report.newly_halted.push_back(record);
          cumulative.insert(std::move(record));
        }
        return true;
      });
  report.omega_lower = cumulative.omega_lower();
  report.cumulative_halted = cumulative.size();
  report.valid_programs = tally.valid;
  report.rejected_candidates = tally.rejected;
  report.state_digest = cumulative.digest();
  return report;
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open checkpoint: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string() + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") ||
      !doc["format"].is_number_integer() || doc["format"].get<int>() != kFormat) {
    throw LoadError(path.string() + ": missing or unsupported checkpoint format");
  }
  Checkpoint cp;
  try {
    cp.machine_digest = doc.at("machine_digest").get<std::string>();
    cp.last_stage = doc.at("last_stage").get<std::uint32_t>();
    for (const auto& entry : doc.at("halted")) {
      HaltRecord record;
      record.program = BitString::parse(entry.at("program").get<std::string>());
      record.output = BitString::parse(entry.at("output").get<std::string>(),
                                       std::numeric_limits<std::size_t>::max());
      record.steps = entry.at("steps").get<std::uint64_t>();
      cp.halted.insert(std::move(record));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": malformed checkpoint: " + e.what());
  }
  // The stored omega lower bound must agree with the reloaded set.
  std::string stored;
  try {
    stored = doc.at("omega_lower").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": malformed checkpoint: " + e.what());
  }
  if (stored != cp.halted.omega_lower().fraction_str()) {
    throw ValidationError(path.string() + ": omega_lower " + stored +
                          " does not match the reloaded halted set (" +
                          cp.halted.omega_lower().fraction_str() + ")");
  }
  return cp;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  json doc;
  doc["format"] = kFormat;
  doc["machine_digest"] = machine_digest;
  doc["last_stage"] = last_stage;
  doc["omega_lower"] = halted.omega_lower().fraction_str();
  doc["state_digest"] = hex16(halted.digest());
  json programs = json::array();
  for (const auto& [program, record] : halted.records()) {
    json entry;
    entry["program"] = program.str();
    entry["output"] = record.output.str();
    entry["steps"] = record.steps;
    programs.push_back(std::move(entry));
  }
  doc["halted"] = std::move(programs);

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write checkpoint: " + tmp.string());
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

void omega_stages_stream(const machine::Machine& machine, std::uint32_t k_max,
                         const std::optional<std::filesystem::path>& checkpoint,
                         const std::function<void(const StageReport&)>& on_report,
                         const StageConfig& config) {
  if (k_max == 0) throw ValidationError("need at least one stage (K >= 1)");
  if (k_max > config.max_length) {
    throw ValidationError("K_max " + std::to_string(k_max) +
                          " exceeds the configured maximum program length " +
                          std::to_string(config.max_length));
  }

  HaltedSet cumulative;
  std::uint32_t first_stage = 1;
  const std::string digest = hex16(machine.digest());
  if (checkpoint && std::filesystem::exists(*checkpoint)) {
    Checkpoint cp = Checkpoint::load(*checkpoint);
    if (cp.machine_digest != digest) {
      throw ValidationError("checkpoint " + checkpoint->string() +
                            " was produced by a different machine (digest " +
                            cp.machine_digest + ", expected " + digest + ")");
    }
    cumulative = std::move(cp.halted);
    first_stage = cp.last_stage + 1;
  }

  for (std::uint32_t stage = first_stage; stage <= k_max; ++stage) {
    StageReport report = stage_run(machine, stage, cumulative, config);
    if (checkpoint) {
      Checkpoint cp;
      cp.machine_digest = digest;
      cp.last_stage = stage;
      cp.halted = cumulative;
      cp.save(*checkpoint);
    }
    on_report(report);
  }
}

std::vector<StageReport> omega_stages(
    const machine::Machine& machine, std::uint32_t k_max,
    const std::optional<std::filesystem::path>& checkpoint,
    const StageConfig& config) {
  std::vector<StageReport> reports;
  omega_stages_stream(machine, k_max, checkpoint,
                      [&](const StageReport& r) { reports.push_back(r); }, config);
  return reports;
}

DyadicRational exact_omega(const machine::Machine& machine) {
  if (!machine.is_table()) {
    throw ValidationError(
        "exact omega is only computable for table machines; for a universal "
        "machine it is uncomputable — use omega-stages for lower bounds");
  }
  DyadicRational sum;
  for (const auto& [key, output] : machine.table().programs) {
    sum += DyadicRational::half_power(key.size());
  }
  return sum;
}

}  // namespace omega::enumerate
