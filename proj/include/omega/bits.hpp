#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "omega/errors.hpp"

namespace omega::bits {

using BigInt = boost::multiprecision::cpp_int;

// Global cap on program/string lengths used by enumerations and parsers.
// A bound, not a storage limit: machine outputs may grow past it.
inline constexpr std::size_t kDefaultMaxLength = 64;

// Finite bit sequence, most-significant (leftmost) bit first.
// Ordered length-lexicographically: shorter before longer, then 0 < 1.
class BitString {
 public:
  BitString() = default;

  // Parses "0101..."; rejects other characters and strings longer than
  // max_length.
  static BitString parse(std::string_view text,
                         std::size_t max_length = kDefaultMaxLength);

  static BitString zeros(std::size_t n);

  void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
  void append(const BitString& other);

  bool bit(std::size_t i) const { return bits_[i] != 0; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  std::string str() const;

  bool is_prefix_of(const BitString& other) const;
  bool is_proper_prefix_of(const BitString& other) const {
    return size() < other.size() && is_prefix_of(other);
  }

  std::strong_ordering operator<=>(const BitString& other) const;
  bool operator==(const BitString& other) const { return bits_ == other.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// Exact nonnegative rational with a power-of-two denominator:
// value = numerator / 2^scale. Canonical form keeps the numerator odd
// (or zero with scale 0), so equality is structural.
class DyadicRational {
 public:
  DyadicRational() = default;

  static DyadicRational zero() { return DyadicRational(); }
  static DyadicRational one() { return from_parts(1, 0); }

  // 1 / 2^k
  static DyadicRational half_power(std::uint64_t k) { return from_parts(1, k); }

  // numerator / 2^scale, canonicalized.
  static DyadicRational from_parts(BigInt numerator, std::uint64_t scale);

  const BigInt& numerator() const { return numerator_; }
  std::uint64_t scale() const { return scale_; }
  bool is_zero() const { return numerator_ == 0; }

  DyadicRational operator+(const DyadicRational& other) const;
  DyadicRational& operator+=(const DyadicRational& other) {
    *this = *this + other;
    return *this;
  }

  std::strong_ordering operator<=>(const DyadicRational& other) const;
  bool operator==(const DyadicRational& other) const {
    return scale_ == other.scale_ && numerator_ == other.numerator_;
  }

  // "3/2^5"; zero renders "0/2^0".
  std::string fraction_str() const;

  // Exact binary rendering "I.b1b2..." with at least min(scale,1) fraction
  // digits; digits, when given, must cover the scale or pads with zeros.
  std::string binary_str(std::optional<std::size_t> digits = {}) const;

 private:
  BigInt numerator_ = 0;
  std::uint64_t scale_ = 0;
};

// First n bits after the binary point of d. Requires 0 <= d < 1; dyadic
// expansions terminate, so bits beyond the scale are 0.
BitString binary_expansion(const DyadicRational& d, std::size_t n);

// Sum of bit_i / 2^i — the value of a finite expansion read back exactly.
DyadicRational value_of_expansion(const BitString& s);

// Result of a prefix-freeness check over a collection of bitstrings.
struct PrefixCheck {
  enum class Status { Ok, Duplicate, Violation };
  Status status = Status::Ok;
  // Violation: (first, second) is the length-lex-least pair with first a
  // proper prefix of second. Duplicate: both hold the repeated member.
  BitString first;
  BitString second;

  bool ok() const { return status == Status::Ok; }
  std::string describe() const;
};

PrefixCheck is_prefix_free(const std::vector<BitString>& members);

// Validated prefix-free set, members kept in length-lex order.
class PrefixCode {
 public:
  // Throws ValidationError (carrying the witness) on duplicates or a
  // prefix violation.
  static PrefixCode make(std::vector<BitString> members);

  const std::vector<BitString>& members() const { return members_; }

 private:
  std::vector<BitString> members_;
};

// Sum over members of 1/2^length. Prefix-freeness guarantees the result
// is at most 1 (asserted).
DyadicRational kraft_sum(const PrefixCode& code);

// Sequential cursor over a BitString.
class BitReader {
 public:
  explicit BitReader(const BitString& s) : s_(&s) {}

  bool eof() const { return pos_ >= s_->size(); }
  std::size_t consumed() const { return pos_; }
  std::size_t remaining() const { return s_->size() - pos_; }
  bool next() { return s_->bit(pos_++); }

 private:
  const BitString* s_;
  std::size_t pos_ = 0;
};

// Elias gamma code for n >= 1: floor(log2 n) zeros, then n in binary.
// Prefix-free; |encode(n)| = 2*floor(log2 n) + 1.
BitString gamma_encode(std::uint64_t n);

struct GammaDecoded {
  std::uint64_t value;
  std::size_t bits_consumed;
};

// Reads one gamma codeword. Returns nullopt when the source runs out
// mid-codeword (the reader is then exhausted).
std::optional<GammaDecoded> gamma_decode(BitReader& reader);

// Length-lex rank: empty -> 0, "0" -> 1, "1" -> 2, "00" -> 3, ...
BigInt index_of(const BitString& s);

// Inverse of index_of. Throws ValidationError when the result would be
// longer than max_length.
BitString from_index(const BigInt& index,
                     std::size_t max_length = kDefaultMaxLength);

}  // namespace omega::bits
