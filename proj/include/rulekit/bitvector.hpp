#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rulekit {

/// Fixed-length bit vector over samples. Bits at positions >= size() are
/// always zero, so popcounts never need a tail mask.
class BitVector {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  static BitVector ones(std::size_t size) { return BitVector(size, true); }

  std::size_t size() const { return size_; }
  std::size_t word_count() const { return words_.size(); }
  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  bool test(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::size_t i) { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::size_t i) { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }
  void assign(std::size_t i, bool value) { value ? set(i) : reset(i); }

  std::size_t count() const;
  bool any() const;
  bool none() const { return !any(); }
  bool all() const { return count() == size_; }

  /// Bitwise complement restricted to [0, size()).
  BitVector operator~() const;
  BitVector& flip();

  BitVector& operator&=(const BitVector& other);
  BitVector& operator|=(const BitVector& other);
  BitVector& operator^=(const BitVector& other);
  /// this &= ~other
  BitVector& and_not(const BitVector& other);

  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

  bool operator==(const BitVector& other) const = default;

  bool is_subset_of(const BitVector& other) const;

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits != 0) {
        fn(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const;

 private:
  void clear_tail();

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

/// popcount(a & b)
std::size_t count_and(const BitVector& a, const BitVector& b);
/// popcount(a & b & c)
std::size_t count_and(const BitVector& a, const BitVector& b, const BitVector& c);
/// popcount(a & ~b)
std::size_t count_and_not(const BitVector& a, const BitVector& b);

}  // namespace rulekit
