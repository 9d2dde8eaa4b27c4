#include "omega/machine.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omega/digest.hpp"

namespace omega::machine {

using bits::BitString;
using bits::DyadicRational;
using json = nlohmann::json;

const char* op_name(Op op) {
  switch (op) {
    case Op::Halt: return "HALT";
    case Op::Inc: return "INC";
    case Op::Dec: return "DEC";
    case Op::Left: return "LEFT";
    case Op::Right: return "RIGHT";
    case Op::LoopBegin: return "LOOP-BEGIN";
    case Op::LoopEnd: return "LOOP-END";
    case Op::Out: return "OUT";
  }
  return "?";
}

const char* reason_name(InvalidProgram::Reason reason) {
  switch (reason) {
    case InvalidProgram::Reason::TruncatedHeader: return "truncated header";
    case InvalidProgram::Reason::TruncatedBody: return "truncated body";
    case InvalidProgram::Reason::TrailingBits: return "trailing bits";
    case InvalidProgram::Reason::UnbalancedLoops: return "unbalanced loops";
  }
  return "?";
}

namespace {

// Fills in the loop-match table; empty result means unbalanced brackets.
std::optional<std::vector<std::uint32_t>> match_loops(const std::vector<Op>& ops) {
  std::vector<std::uint32_t> match(ops.size(), 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < ops.size(); ++i) {
    if (ops[i] == Op::LoopBegin) {
      stack.push_back(i);
    } else if (ops[i] == Op::LoopEnd) {
      if (stack.empty()) return std::nullopt;
      match[i] = stack.back();
      match[stack.back()] = i;
      stack.pop_back();
    }
  }
  if (!stack.empty()) return std::nullopt;
  return match;
}

}  // namespace

DecodeResult decode_program(const BitString& program) {
  bits::BitReader reader(program);
  auto header = bits::gamma_decode(reader);
  if (!header) {
    return InvalidProgram{InvalidProgram::Reason::TruncatedHeader,
                          "input ends inside the gamma-coded instruction count"};
  }
  const std::uint64_t count = header->value;
  if (count > reader.remaining() / 3) {
    return InvalidProgram{
        InvalidProgram::Reason::TruncatedBody,
        "header announces " + std::to_string(count) + " opcodes but only " +
            std::to_string(reader.remaining()) + " bits follow"};
  }
  Program decoded;
  decoded.header_bits = header->bits_consumed;
  decoded.ops.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    unsigned value = 0;
    for (int b = 0; b < 3; ++b) value = (value << 1) | (reader.next() ? 1u : 0u);
    decoded.ops.push_back(static_cast<Op>(value));
  }
  if (!reader.eof()) {
    return InvalidProgram{InvalidProgram::Reason::TrailingBits,
                          std::to_string(reader.remaining()) +
                              " bits past the end of a complete program"};
  }
  auto match = match_loops(decoded.ops);
  if (!match) {
    return InvalidProgram{InvalidProgram::Reason::UnbalancedLoops,
                          "loop brackets do not pair up"};
  }
  decoded.match = std::move(*match);
  return decoded;
}

BitString encode_program(std::span<const Op> ops) {
  BitString out = bits::gamma_encode(ops.size());
  for (Op op : ops) {
    const auto value = static_cast<unsigned>(op);
    out.push_back((value >> 2) & 1);
    out.push_back((value >> 1) & 1);
    out.push_back(value & 1);
  }
  return out;
}

BitString print_program(const BitString& target) {
  std::vector<Op> ops;
  bool parity = false;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target.bit(i) != parity) {
      ops.push_back(Op::Inc);
      parity = !parity;
    }
    ops.push_back(Op::Out);
  }
  if (ops.empty()) ops.push_back(Op::Halt);  // gamma header needs n >= 1
  return encode_program(ops);
}

bool halted(const RunOutcome& outcome) {
  return std::holds_alternative<Halted>(outcome);
}

std::string outcome_str(const RunOutcome& outcome) {
  if (const auto* h = std::get_if<Halted>(&outcome)) {
    return "halted output=" + h->output.str() + " steps=" + std::to_string(h->steps) +
           " bits_consumed=" + std::to_string(h->bits_consumed);
  }
  if (const auto* e = std::get_if<Exhausted>(&outcome)) {
    return "exhausted fuel=" + std::to_string(e->fuel);
  }
  return "invalid: " + std::get<Invalid>(outcome).reason;
}

RunOutcome run_decoded(const Program& program, const ExecConfig& config) {
  if (config.fuel == 0) throw ValidationError("fuel must be at least 1");

  // Tape: nonnegative head positions in right, negative in left.
  std::vector<std::uint64_t> right(8, 0), left;
  std::int64_t head = 0;
  auto cell = [&]() -> std::uint64_t& {
    if (head >= 0) {
      if (static_cast<std::size_t>(head) >= right.size()) right.resize(head + 1, 0);
      return right[head];
    }
    const std::size_t idx = static_cast<std::size_t>(-head) - 1;
    if (idx >= left.size()) left.resize(idx + 1, 0);
    return left[idx];
  };

  BitString output;
  std::uint64_t steps = 0;
  std::size_t pc = 0;
  while (pc < program.ops.size()) {
    if (steps == config.fuel) return Exhausted{config.fuel};
    ++steps;
    switch (program.ops[pc]) {
      case Op::Halt:
        return Halted{std::move(output), steps, program.length_bits()};
      case Op::Inc:
        ++cell();
        ++pc;
        break;
      case Op::Dec: {
        auto& c = cell();
        if (c > 0) --c;
        ++pc;
        break;
      }
      case Op::Left:
        --head;
        ++pc;
        break;
      case Op::Right:
        ++head;
        ++pc;
        break;
      case Op::LoopBegin:
        pc = (cell() == 0) ? program.match[pc] + 1 : pc + 1;
        break;
      case Op::LoopEnd:
        pc = (cell() != 0) ? program.match[pc] : pc + 1;
        break;
      case Op::Out:
        output.push_back((cell() & 1) != 0);
        ++pc;
        break;
    }
  }
  // Fell off the end: implicit halt.
  return Halted{std::move(output), steps, program.length_bits()};
}

RunOutcome run(const Machine& machine, const BitString& program,
               const ExecConfig& config) {
  if (config.fuel == 0) throw ValidationError("fuel must be at least 1");
  if (machine.is_table()) {
    const auto& table = machine.table().programs;
    auto it = table.find(program);
    if (it == table.end()) {
      return Invalid{"not a program of this table machine"};
    }
    return Halted{it->second, 1, program.size()};
  }
  DecodeResult decoded = decode_program(program);
  if (const auto* invalid = std::get_if<InvalidProgram>(&decoded)) {
    return Invalid{std::string(reason_name(invalid->reason)) + ": " + invalid->detail};
  }
  return run_decoded(std::get<Program>(decoded), config);
}

TableValidation validate_table(const TableMachine& table) {
  TableValidation result;
  std::vector<BitString> keys;
  keys.reserve(table.programs.size());
  DyadicRational sum;
  for (const auto& [key, output] : table.programs) {
    keys.push_back(key);
    sum += DyadicRational::half_power(key.size());
  }
  result.check = bits::is_prefix_free(keys);
  result.kraft = sum;
  result.complete_boundary = result.ok() && sum == DyadicRational::one();
  return result;
}

Machine::Machine(TableMachine table) : spec_(std::move(table)) {
  const auto& programs = std::get<TableMachine>(spec_).programs;
  if (programs.empty()) {
    throw ValidationError("table machine needs at least one program");
  }
  TableValidation validation = validate_table(std::get<TableMachine>(spec_));
  if (!validation.ok()) {
    throw ValidationError("table machine keys: " + validation.check.describe());
  }
}

Machine::Machine(UniversalMachine universal) : spec_(std::move(universal)) {
  const auto& isa = std::get<UniversalMachine>(spec_).isa;
  if (isa != kBitbfIsa) {
    throw LoadError("unknown ISA identifier: " + isa);
  }
}

namespace {

void require_fields(const json& object, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw LoadError("unknown field \"" + key + "\" in " + where);
    }
  }
}

BitString parse_bits_field(const json& value, const std::string& where) {
  if (!value.is_string()) throw LoadError(where + " must be a string of 0/1");
  const std::string text = value.get<std::string>();
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw LoadError(where + " must contain only 0/1, got \"" + text + "\"");
    }
  }
  return BitString::parse(text);
}

}  // namespace

Machine Machine::parse_spec(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(origin + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw LoadError(origin + ": spec must be a JSON object");
  if (!doc.contains("format") || !doc["format"].is_number_integer() ||
      doc["format"].get<int>() != 1) {
    throw LoadError(origin + ": missing or unsupported \"format\" (expected 1)");
  }
  if (!doc.contains("type") || !doc["type"].is_string()) {
    throw LoadError(origin + ": missing \"type\"");
  }
  const std::string type = doc["type"].get<std::string>();
  if (type == "table") {
    require_fields(doc, {"format", "type", "programs"}, origin);
    if (!doc.contains("programs") || !doc["programs"].is_array()) {
      throw LoadError(origin + ": table machine needs a \"programs\" array");
    }
    TableMachine table;
    for (const auto& entry : doc["programs"]) {
      if (!entry.is_object()) {
        throw LoadError(origin + ": each program entry must be an object");
      }
      require_fields(entry, {"bits", "output"}, origin + " program entry");
      if (!entry.contains("bits")) {
        throw LoadError(origin + ": program entry missing \"bits\"");
      }
      BitString key = parse_bits_field(entry["bits"], origin + ": \"bits\"");
      BitString output;
      if (entry.contains("output")) {
        output = parse_bits_field(entry["output"], origin + ": \"output\"");
      }
      if (!table.programs.emplace(std::move(key), std::move(output)).second) {
        throw ValidationError(origin + ": duplicate program \"" +
                              entry["bits"].get<std::string>() + "\"");
      }
    }
    return Machine(std::move(table));
  }
  if (type == "universal") {
    require_fields(doc, {"format", "type", "isa"}, origin);
    if (!doc.contains("isa") || !doc["isa"].is_string()) {
      throw LoadError(origin + ": universal machine needs an \"isa\" string");
    }
    return Machine(UniversalMachine{doc["isa"].get<std::string>()});
  }
  throw LoadError(origin + ": unknown machine type \"" + type + "\"");
}

Machine Machine::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open machine spec: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str(), path.string());
}

std::string Machine::canonical_description() const {
  std::ostringstream out;
  if (is_table()) {
    out << "table\n";
    for (const auto& [key, output] : table().programs) {
      out << key.str() << ' ' << output.str() << '\n';
    }
  } else {
    out << "universal " << std::get<UniversalMachine>(spec_).isa << '\n';
  }
  return out.str();
}

std::uint64_t Machine::digest() const {
  return Fnv1a64().update(canonical_description()).value();
}

EnumTally for_each_valid_program(
    const Machine& machine, std::size_t max_bits,
    const std::function<bool(const BitString&, const Program*)>& fn) {
  EnumTally tally;
  if (machine.is_table()) {
    for (const auto& [key, output] : machine.table().programs) {
      if (key.size() > max_bits) continue;
      ++tally.valid;
      if (!fn(key, nullptr)) return tally;
    }
    return tally;
  }

  // Universal machine: generate gamma(n) + body candidates directly.
  // Program length is strictly increasing in n and bodies are produced in
  // lexicographic order, so the sequence is length-lex overall.
  for (std::uint64_t count = 1;; ++count) {
    const BitString header = bits::gamma_encode(count);
    const std::size_t total_bits = header.size() + 3 * count;
    if (total_bits > max_bits) break;

    std::vector<unsigned> body(count, 0);
    for (;;) {
      std::vector<Op> ops;
      ops.reserve(count);
      for (unsigned digit : body) ops.push_back(static_cast<Op>(digit));
      if (auto match = match_loops(ops)) {
        Program program;
        program.ops = std::move(ops);
        program.match = std::move(*match);
        program.header_bits = header.size();
        BitString encoded = header;
        for (unsigned digit : body) {
          encoded.push_back((digit >> 2) & 1);
          encoded.push_back((digit >> 1) & 1);
          encoded.push_back(digit & 1);
        }
        ++tally.valid;
        if (!fn(encoded, &program)) return tally;
      } else {
        ++tally.rejected;
      }
      // Odometer increment over base-8 digits.
      std::size_t pos = count;
      while (pos > 0) {
        if (++body[pos - 1] < 8) break;
        body[pos - 1] = 0;
        --pos;
      }
      if (pos == 0) break;
    }
  }
  return tally;
}

}  // namespace omega::machine
