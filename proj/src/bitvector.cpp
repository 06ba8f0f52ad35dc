#include "rulekit/bitvector.hpp"

#include <cassert>

namespace rulekit {

namespace {
std::size_t words_for(std::size_t bits) { return (bits + BitVector::kWordBits - 1) / BitVector::kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t size, bool value)
    : size_(size), words_(words_for(size), value ? ~Word{0} : Word{0}) {
  clear_tail();
}

void BitVector::clear_tail() {
  const std::size_t rem = size_ % kWordBits;
  if (rem != 0 && !words_.empty()) words_.back() &= (Word{1} << rem) - 1;
}

std::size_t BitVector::count() const {
  std::size_t n = 0;
  for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool BitVector::any() const {
  for (Word w : words_)
    if (w != 0) return true;
  return false;
}

BitVector BitVector::operator~() const {
  BitVector out(*this);
  return out.flip(), out;
}

BitVector& BitVector::flip() {
  for (Word& w : words_) w = ~w;
  clear_tail();
  return *this;
}

BitVector& BitVector::operator&=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitVector& BitVector::and_not(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

bool BitVector::is_subset_of(const BitVector& other) const {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  return true;
}

std::vector<std::size_t> BitVector::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each_set([&](std::size_t i) { out.push_back(i); });
  return out;
}

std::size_t count_and(const BitVector& a, const BitVector& b) {
  assert(a.size() == b.size());
  const auto wa = a.words(), wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) n += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return n;
}

std::size_t count_and(const BitVector& a, const BitVector& b, const BitVector& c) {
  assert(a.size() == b.size() && a.size() == c.size());
  const auto wa = a.words(), wb = b.words(), wc = c.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i)
    n += static_cast<std::size_t>(std::popcount(wa[i] & wb[i] & wc[i]));
  return n;
}

std::size_t count_and_not(const BitVector& a, const BitVector& b) {
  assert(a.size() == b.size());
  const auto wa = a.words(), wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) n += static_cast<std::size_t>(std::popcount(wa[i] & ~wb[i]));
  return n;
}

}  // namespace rulekit
