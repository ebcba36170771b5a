#include "surfcert/words.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "surfcert/error.hpp"

namespace surfcert {

char Letter::to_char() const {
  char c = static_cast<char>('a' + generator());
  return is_inverse() ? static_cast<char>(c - 'a' + 'A') : c;
}

Letter parse_letter(char c, int rank) {
  int gen;
  bool inv;
  if (c >= 'a' && c <= 'z') {
    gen = c - 'a';
    inv = false;
  } else if (c >= 'A' && c <= 'Z') {
    gen = c - 'A';
    inv = true;
  } else {
    throw Error(ErrorCode::Parse, std::string("not a letter: '") + c + "'");
  }
  if (gen >= rank) {
    throw Error(ErrorCode::Parse, std::string("letter '") + c +
                                      "' exceeds rank " + std::to_string(rank));
  }
  return Letter(gen, inv);
}

std::vector<Letter> parse_letters(std::string_view text, int rank) {
  if (rank < 1 || rank > kMaxRank) {
    throw Error(ErrorCode::InvalidArgument, "rank must be in 1..26");
  }
  std::vector<Letter> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(parse_letter(c, rank));
  return out;
}

std::string letters_to_string(std::span<const Letter> letters) {
  std::string s;
  s.reserve(letters.size());
  for (Letter l : letters) s.push_back(l.to_char());
  return s;
}

bool is_reduced(std::span<const Letter> letters) {
  for (std::size_t i = 1; i < letters.size(); ++i) {
    if (letters[i] == letters[i - 1].inverse()) return false;
  }
  return true;
}

bool is_cyclically_reduced(std::span<const Letter> letters) {
  if (!is_reduced(letters)) return false;
  return letters.size() < 2 || letters.front() != letters.back().inverse();
}

Word Word::reduce(std::span<const Letter> raw) {
  std::vector<Letter> stack;
  stack.reserve(raw.size());
  for (Letter l : raw) {
    if (!stack.empty() && stack.back() == l.inverse()) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  return Word(std::move(stack));
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (Letter& l : out) l = l.inverse();
  return Word(std::move(out));
}

Word operator*(const Word& u, const Word& v) {
  std::size_t cancel = 0;
  while (cancel < u.size() && cancel < v.size() &&
         u.letters_[u.size() - 1 - cancel] == v.letters_[cancel].inverse()) {
    ++cancel;
  }
  std::vector<Letter> out(u.letters_.begin(), u.letters_.end() - cancel);
  out.insert(out.end(), v.letters_.begin() + cancel, v.letters_.end());
  return Word(std::move(out));
}

std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::size_t i = 0, j = 1, k = 0;
  while (i < n && j < n && k < n) {
    Letter a = s[(i + k) % n];
    Letter b = s[(j + k) % n];
    if (a == b) {
      ++k;
      continue;
    }
    if (a > b) {
      i += k + 1;
    } else {
      j += k + 1;
    }
    if (i == j) ++j;
    k = 0;
  }
  return std::min(i, j);
}

CyclicWord CyclicWord::from_letters(std::span<const Letter> letters) {
  if (letters.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cyclic word must be nonempty");
  }
  if (!is_cyclically_reduced(letters)) {
    throw Error(ErrorCode::InvalidArgument,
                "not cyclically reduced: " + letters_to_string(letters));
  }
  CyclicWord w;
  std::size_t r = least_rotation(letters);
  w.letters_.reserve(letters.size());
  w.letters_.insert(w.letters_.end(), letters.begin() + r, letters.end());
  w.letters_.insert(w.letters_.end(), letters.begin(), letters.begin() + r);
  return w;
}

CyclicWord CyclicWord::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (Letter& l : out) l = l.inverse();
  return from_letters(out);
}

CyclicReduction cyclic_reduce(const Word& w) {
  if (w.empty()) throw Error(ErrorCode::EmptyWord, "cannot cyclically reduce the trivial word");
  auto s = w.letters();
  std::size_t lo = 0, hi = s.size();
  while (hi - lo >= 2 && s[lo] == s[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  auto middle = s.subspan(lo, hi - lo);
  std::size_t r = least_rotation(middle);
  // middle = p q with core = q p, so w = (u p) core (u p)^-1.
  std::vector<Letter> conj(s.begin(), s.begin() + lo);
  conj.insert(conj.end(), middle.begin(), middle.begin() + r);
  return {CyclicWord::from_letters(middle), Word::reduce(conj)};
}

namespace {

constexpr int kCensusBits = 6;
constexpr int kMaxCensusT = 64 / kCensusBits;

}  // namespace

SubwordCensus census(std::span<const CyclicWord> chain, int T) {
  if (T < 1 || T > kMaxCensusT) {
    throw Error(ErrorCode::InvalidArgument,
                "census length T must be in 1.." + std::to_string(kMaxCensusT));
  }
  std::unordered_map<std::uint64_t, std::uint64_t> raw;
  SubwordCensus out;
  out.T = T;
  for (const CyclicWord& c : chain) {
    const auto s = c.letters();
    const std::size_t m = s.size();
    out.total_length += m;
    for (std::size_t i = 0; i < m; ++i) {
      std::uint64_t key = 0;
      for (int j = 0; j < T; ++j) {
        key = (key << kCensusBits) | static_cast<std::uint64_t>(s[(i + j) % m].code());
      }
      ++raw[key];
    }
  }
  std::vector<Letter> buf(static_cast<std::size_t>(T));
  for (const auto& [packed, count] : raw) {
    std::uint64_t key = packed;
    for (int j = T - 1; j >= 0; --j) {
      buf[static_cast<std::size_t>(j)] = Letter::from_code(static_cast<int>(key & 63));
      key >>= kCensusBits;
    }
    out.counts.emplace(Word::reduce(buf), count);
  }
  return out;
}

std::uint64_t reduced_word_count(int rank, int T) {
  if (T == 0) return 1;
  std::uint64_t n = 2 * static_cast<std::uint64_t>(rank);
  for (int i = 1; i < T; ++i) n *= 2 * static_cast<std::uint64_t>(rank) - 1;
  return n;
}

std::vector<Word> all_reduced_words(int rank, int T) {
  constexpr std::uint64_t kLimit = 10'000'000;
  if (reduced_word_count(rank, T) > kLimit) {
    throw Error(ErrorCode::TooLarge, "too many reduced words to enumerate");
  }
  std::vector<Word> out;
  std::vector<Letter> cur;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == T) {
      out.push_back(Word::reduce(cur));
      return;
    }
    for (int code = 0; code < 2 * rank; ++code) {
      Letter l = Letter::from_code(code);
      if (!cur.empty() && cur.back() == l.inverse()) continue;
      cur.push_back(l);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

PseudorandomReport is_pseudorandom(std::span<const CyclicWord> chain, int rank,
                                   const PseudorandomParams& params) {
  if (params.T < 1 || !(params.epsilon >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "pseudorandom parameters need T >= 1, epsilon >= 0");
  }
  PseudorandomReport report;
  SubwordCensus cen = census(chain, params.T);
  if (cen.total_length == 0) return report;
  const double scale = static_cast<double>(reduced_word_count(rank, params.T)) /
                       static_cast<double>(cen.total_length);
  double worst_dev = -1;
  bool ok = true;
  for (const Word& sigma : all_reduced_words(rank, params.T)) {
    auto it = cen.counts.find(sigma);
    double count = it == cen.counts.end() ? 0.0 : static_cast<double>(it->second);
    double ratio = count * scale;
    if (ratio < 1 - params.epsilon || ratio > 1 + params.epsilon) ok = false;
    double dev = std::abs(ratio - 1);
    if (dev > worst_dev) {
      worst_dev = dev;
      report.worst = sigma;
      report.worst_ratio = ratio;
    }
  }
  report.pseudorandom = ok;
  return report;
}

std::vector<long> abelianize(std::span<const Letter> letters, int rank) {
  std::vector<long> v(static_cast<std::size_t>(rank), 0);
  for (Letter l : letters) {
    if (l.generator() >= rank) {
      throw Error(ErrorCode::InvalidArgument, "letter beyond rank in abelianize");
    }
    v[static_cast<std::size_t>(l.generator())] += l.sign();
  }
  return v;
}

std::vector<long> abelianize(const Word& w, int rank) { return abelianize(w.letters(), rank); }

namespace {

template <typename W>
bool homologically_trivial_impl(std::span<const W> chain, int rank) {
  std::vector<long> total(static_cast<std::size_t>(rank), 0);
  for (const W& w : chain) {
    auto v = abelianize(w.letters(), rank);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += v[i];
  }
  return std::all_of(total.begin(), total.end(), [](long x) { return x == 0; });
}

}  // namespace

bool is_homologically_trivial(std::span<const Word> chain, int rank) {
  return homologically_trivial_impl(chain, rank);
}

bool is_homologically_trivial(std::span<const CyclicWord> chain, int rank) {
  return homologically_trivial_impl(chain, rank);
}

Word sample_reduced_word(std::size_t n, int rank, Rng& rng) {
  if (rank < 1 || rank > kMaxRank) {
    throw Error(ErrorCode::InvalidArgument, "rank must be in 1..26");
  }
  std::vector<Letter> out;
  out.reserve(n);
  const std::uint64_t k = 2 * static_cast<std::uint64_t>(rank);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.empty()) {
      out.push_back(Letter::from_code(static_cast<int>(uniform_below(rng, k))));
    } else {
      // Skip the cancelling letter by shifting draws at or above it.
      int forbidden = out.back().inverse().code();
      int c = static_cast<int>(uniform_below(rng, k - 1));
      if (c >= forbidden) ++c;
      out.push_back(Letter::from_code(c));
    }
  }
  return Word::reduce(out);
}

}  // namespace surfcert
