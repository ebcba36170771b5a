#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surfcert/random.hpp"

namespace surfcert {

// Generator i is written as the i-th lowercase ASCII letter, its inverse as
// the matching uppercase letter, which caps the rank at 26.
inline constexpr int kMaxRank = 26;

// A generator or inverse generator of a free group. The packed code
// 2*generator + (inverse ? 1 : 0) orders letters as a < A < b < B < ...
class Letter {
 public:
  constexpr Letter() = default;
  constexpr Letter(int generator, bool inverse)
      : code_(static_cast<std::uint8_t>(2 * generator + (inverse ? 1 : 0))) {}

  static constexpr Letter from_code(int code) {
    Letter l;
    l.code_ = static_cast<std::uint8_t>(code);
    return l;
  }

  constexpr int generator() const { return code_ >> 1; }
  constexpr bool is_inverse() const { return (code_ & 1) != 0; }
  constexpr int sign() const { return is_inverse() ? -1 : 1; }
  constexpr int code() const { return code_; }
  constexpr Letter inverse() const { return from_code(code_ ^ 1); }
  char to_char() const;

  friend constexpr auto operator<=>(Letter, Letter) = default;

 private:
  std::uint8_t code_ = 0;
};

// Throws Error(Parse) for non-letters and letters beyond the rank.
Letter parse_letter(char c, int rank = kMaxRank);
std::vector<Letter> parse_letters(std::string_view text, int rank = kMaxRank);
std::string letters_to_string(std::span<const Letter> letters);

bool is_reduced(std::span<const Letter> letters);
bool is_cyclically_reduced(std::span<const Letter> letters);

// Reduced word; the representative of an element of the free group.
class Word {
 public:
  Word() = default;

  // Free reduction of an arbitrary letter sequence.
  static Word reduce(std::span<const Letter> raw);
  static Word parse(std::string_view text, int rank = kMaxRank) {
    return reduce(parse_letters(text, rank));
  }

  std::span<const Letter> letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const;
  std::string to_string() const { return letters_to_string(letters_); }

  friend Word operator*(const Word& u, const Word& v);
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  std::vector<Letter> letters_;
};

// Nonempty cyclically reduced word stored in its lexicographically least
// rotation, so equal conjugacy classes compare equal.
class CyclicWord {
 public:
  // Requires a nonempty cyclically reduced sequence; throws InvalidArgument.
  static CyclicWord from_letters(std::span<const Letter> letters);
  static CyclicWord parse(std::string_view text, int rank = kMaxRank) {
    auto letters = parse_letters(text, rank);
    return from_letters(letters);
  }

  std::span<const Letter> letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Word as_word() const { return Word::reduce(letters_); }
  CyclicWord inverse() const;
  std::string to_string() const { return letters_to_string(letters_); }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;
  friend auto operator<=>(const CyclicWord&, const CyclicWord&) = default;

 private:
  CyclicWord() = default;
  std::vector<Letter> letters_;
};

// Index of the lexicographically least rotation (Booth-style two pointers).
std::size_t least_rotation(std::span<const Letter> letters);

struct CyclicReduction {
  CyclicWord core;
  Word conjugator;  // w == conjugator * core * conjugator^-1
};

// Throws Error(EmptyWord) on the trivial word.
CyclicReduction cyclic_reduce(const Word& w);

struct PseudorandomParams {
  int T = 1;
  double epsilon = 0.1;
};

struct SubwordCensus {
  int T = 1;
  std::map<Word, std::uint64_t> counts;  // only subwords that occur
  std::uint64_t total_length = 0;
};

// Counts length-T subwords read cyclically around every component (wrapping
// as often as needed), pooled over the collection.
SubwordCensus census(std::span<const CyclicWord> chain, int T);

// Number of reduced words of length T in a free group of rank l.
std::uint64_t reduced_word_count(int rank, int T);

// All reduced words of length T in lexicographic letter order.
std::vector<Word> all_reduced_words(int rank, int T);

struct PseudorandomReport {
  bool pseudorandom = false;
  Word worst;               // subword whose normalized frequency is furthest from 1
  double worst_ratio = 0;   // C_sigma / length * (2l)(2l-1)^(T-1)
};

PseudorandomReport is_pseudorandom(std::span<const CyclicWord> chain, int rank,
                                   const PseudorandomParams& params);

std::vector<long> abelianize(const Word& w, int rank);
std::vector<long> abelianize(std::span<const Letter> letters, int rank);
bool is_homologically_trivial(std::span<const Word> chain, int rank);
bool is_homologically_trivial(std::span<const CyclicWord> chain, int rank);

// Uniform reduced word of length n: first letter uniform over 2l, each later
// letter uniform over the 2l-1 letters that do not cancel.
Word sample_reduced_word(std::size_t n, int rank, Rng& rng);

}  // namespace surfcert
