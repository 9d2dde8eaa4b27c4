#include "omega/bits.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <sstream>

#include "omega/digest.hpp"

namespace omega::bits {

BitString BitString::parse(std::string_view text, std::size_t max_length) {
  if (text.size() > max_length) {
    throw ValidationError("bitstring longer than the configured maximum (" +
                          std::to_string(text.size()) + " > " +
                          std::to_string(max_length) + ")");
  }
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ValidationError(std::string("bitstring may contain only 0 and 1, got '") +
                            c + "'");
    }
    out.bits_.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

BitString BitString::zeros(std::size_t n) {
  BitString out;
  out.bits_.assign(n, 0);
  return out;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::string BitString::str() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

bool BitString::is_prefix_of(const BitString& other) const {
  if (size() > other.size()) return false;
  return std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

std::strong_ordering BitString::operator<=>(const BitString& other) const {
  if (size() != other.size()) return size() <=> other.size();
  for (std::size_t i = 0; i < size(); ++i) {
    if (bits_[i] != other.bits_[i]) return bits_[i] <=> other.bits_[i];
  }
  return std::strong_ordering::equal;
}

DyadicRational DyadicRational::from_parts(BigInt numerator, std::uint64_t scale) {
  if (numerator < 0) {
    throw ValidationError("dyadic rationals are nonnegative");
  }
  DyadicRational d;
  if (numerator == 0) return d;
  // Fold trailing powers of two into the scale; below scale 0 the value
  // is an integer and the numerator keeps the remaining factor.
  while (scale > 0 && (numerator & 1) == 0) {
    numerator >>= 1;
    --scale;
  }
  d.numerator_ = std::move(numerator);
  d.scale_ = scale;
  return d;
}

DyadicRational DyadicRational::operator+(const DyadicRational& other) const {
  const std::uint64_t scale = std::max(scale_, other.scale_);
  BigInt a = numerator_ << (scale - scale_);
  BigInt b = other.numerator_ << (scale - other.scale_);
  return from_parts(a + b, scale);
}

std::strong_ordering DyadicRational::operator<=>(const DyadicRational& other) const {
  const std::uint64_t scale = std::max(scale_, other.scale_);
  BigInt a = numerator_ << (scale - scale_);
  BigInt b = other.numerator_ << (scale - other.scale_);
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string DyadicRational::fraction_str() const {
  std::ostringstream out;
  out << numerator_ << "/2^" << scale_;
  return out.str();
}

std::string DyadicRational::binary_str(std::optional<std::size_t> digits) const {
  const std::size_t n =
      std::max<std::size_t>(digits.value_or(0), std::max<std::uint64_t>(scale_, 1));
  BigInt integer_part = numerator_ >> scale_;
  std::ostringstream out;
  out << integer_part << '.';
  for (std::size_t i = 1; i <= n; ++i) {
    if (i <= scale_) {
      out << (((numerator_ >> (scale_ - i)) & 1) != 0 ? '1' : '0');
    } else {
      out << '0';
    }
  }
  return out.str();
}

BitString binary_expansion(const DyadicRational& d, std::size_t n) {
  if (d.numerator() >> d.scale() != 0) {
    throw ValidationError("binary expansion requires 0 <= d < 1, got " +
                          d.fraction_str());
  }
  BitString out;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i <= d.scale()) {
      out.push_back(((d.numerator() >> (d.scale() - i)) & 1) != 0);
    } else {
      out.push_back(false);
    }
  }
  return out;
}

DyadicRational value_of_expansion(const BitString& s) {
  BigInt numerator = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    numerator <<= 1;
    if (s.bit(i)) numerator += 1;
  }
  return DyadicRational::from_parts(std::move(numerator), s.size());
}

std::string PrefixCheck::describe() const {
  switch (status) {
    case Status::Ok:
      return "ok";
    case Status::Duplicate:
      return "duplicate member " + first.str();
    case Status::Violation:
      return "prefix violation: (" + first.str() + ", " + second.str() + ")";
  }
  return "ok";
}

PrefixCheck is_prefix_free(const std::vector<BitString>& members) {
  std::vector<BitString> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) {
      return {PrefixCheck::Status::Duplicate, sorted[i], sorted[i + 1]};
    }
  }
  // Sorted scan returns the length-lex-least witness pair: candidates are
  // examined in ascending (p, q) order.
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (sorted[i].is_proper_prefix_of(sorted[j])) {
        return {PrefixCheck::Status::Violation, sorted[i], sorted[j]};
      }
    }
  }
  return {};
}

PrefixCode PrefixCode::make(std::vector<BitString> members) {
  PrefixCheck check = is_prefix_free(members);
  if (!check.ok()) {
    throw ValidationError("not a prefix-free set: " + check.describe());
  }
  std::sort(members.begin(), members.end());
  PrefixCode code;
  code.members_ = std::move(members);
  return code;
}

DyadicRational kraft_sum(const PrefixCode& code) {
  DyadicRational sum;
  for (const BitString& member : code.members()) {
    sum += DyadicRational::half_power(member.size());
  }
  assert(sum <= DyadicRational::one());
  return sum;
}

BitString gamma_encode(std::uint64_t n) {
  if (n == 0) throw ValidationError("gamma code is defined for n >= 1");
  const int width = std::bit_width(n);  // bits of n, leading 1 included
  BitString out;
  for (int i = 0; i < width - 1; ++i) out.push_back(false);
  for (int i = width - 1; i >= 0; --i) out.push_back((n >> i) & 1);
  return out;
}

std::optional<GammaDecoded> gamma_decode(BitReader& reader) {
  const std::size_t start = reader.consumed();
  std::size_t zeros = 0;
  for (;;) {
    if (reader.eof()) return std::nullopt;  // truncated mid-header
    if (reader.next()) break;
    ++zeros;
  }
  std::uint64_t value = 1;
  for (std::size_t i = 0; i < zeros; ++i) {
    if (reader.eof()) return std::nullopt;  // truncated mid-codeword
    value = (value << 1) | (reader.next() ? 1u : 0u);
  }
  return GammaDecoded{value, reader.consumed() - start};
}

BigInt index_of(const BitString& s) {
  // rank = (2^len - 1) + value(s)
  BigInt rank = (BigInt(1) << s.size()) - 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.bit(i)) rank += BigInt(1) << (s.size() - 1 - i);
  }
  return rank;
}

BitString from_index(const BigInt& index, std::size_t max_length) {
  if (index < 0) throw ValidationError("index must be nonnegative");
  BigInt offset = index + 1;  // 2^len <= index+1 < 2^(len+1)
  std::size_t len = 0;
  while (offset >> (len + 1) != 0) ++len;
  if (len > max_length) {
    throw ValidationError("index " + index.str() +
                          " maps past the configured maximum length " +
                          std::to_string(max_length));
  }
  BigInt value = offset - (BigInt(1) << len);
  BitString out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(((value >> (len - 1 - i)) & 1) != 0);
  }
  return out;
}

}  // namespace omega::bits
