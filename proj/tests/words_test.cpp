#include <array>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "surfcert/error.hpp"
#include "surfcert/words.hpp"

using namespace surfcert;

namespace {

std::vector<CyclicWord> cyc(std::initializer_list<const char*> ws) {
  std::vector<CyclicWord> out;
  for (const char* w : ws) out.push_back(CyclicWord::parse(w));
  return out;
}

std::string power(const std::string& s, int m) {
  std::string out;
  for (int i = 0; i < m; ++i) out += s;
  return out;
}

}  // namespace

TEST_CASE("letters invert and order a < A < b < B") {
  for (int g = 0; g < 4; ++g) {
    for (bool inv : {false, true}) {
      Letter l(g, inv);
      CHECK(l.inverse().inverse() == l);
      CHECK(l.inverse() != l);
    }
  }
  CHECK(parse_letter('a') < parse_letter('A'));
  CHECK(parse_letter('A') < parse_letter('b'));
  CHECK(parse_letter('b') < parse_letter('B'));
  CHECK_THROWS_AS(parse_letter('c', 2), Error);
  CHECK_THROWS_AS(parse_letter('1'), Error);
  CHECK_THROWS_AS(Word::parse("ab-"), Error);
}

TEST_CASE("reduce") {
  CHECK(Word::parse("abBA").empty());
  CHECK(Word::parse("abAB").to_string() == "abAB");
  CHECK(Word::parse("aBbc").to_string() == "ac");
}

TEST_CASE("reduce agrees with repeated deletion and is idempotent") {
  Rng rng(11);
  const std::string letters = oracle::alphabet(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::string raw;
    const auto len = uniform_below(rng, 40);
    for (std::uint64_t i = 0; i < len; ++i) raw.push_back(letters[uniform_below(rng, letters.size())]);
    const Word w = Word::parse(raw);
    CHECK(w.to_string() == oracle::reduce_string(raw));
    CHECK(Word::reduce(w.letters()) == w);
    CHECK((w * w.inverse()).empty());
    const Word u = Word::parse(oracle::reduce_string(raw.substr(0, raw.size() / 2)));
    const Word v = Word::parse(oracle::reduce_string(raw.substr(raw.size() / 2)));
    CHECK((u * v).size() <= u.size() + v.size());
    const auto sum = abelianize(u * v, 3);
    const auto au = abelianize(u, 3), av = abelianize(v, 3);
    for (int g = 0; g < 3; ++g) CHECK(sum[g] == au[g] + av[g]);
  }
}

TEST_CASE("cyclic_reduce") {
  const auto r = cyclic_reduce(Word::parse("bAB"));
  CHECK(r.core.to_string() == "A");
  CHECK(r.conjugator.to_string() == "b");
  const auto s = cyclic_reduce(Word::parse("abAB"));
  CHECK(s.core.to_string() == "abAB");
  CHECK(s.conjugator.empty());
  CHECK(CyclicWord::parse("ba").to_string() == "ab");
  CHECK_THROWS_AS(cyclic_reduce(Word()), Error);
  try {
    cyclic_reduce(Word());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyWord);
  }
}

TEST_CASE("cyclic_reduce conjugates back to the input") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const Word w = sample_reduced_word(1 + uniform_below(rng, 200), 2, rng);
    const auto [core, u] = cyclic_reduce(w);
    CHECK(u * core.as_word() * u.inverse() == w);
    CHECK(is_cyclically_reduced(core.letters()));
  }
}

TEST_CASE("canonical rotation is rotation invariant and least") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const CyclicWord c = cyclic_reduce(sample_reduced_word(1 + uniform_below(rng, 30), 3, rng)).core;
    const std::string s = c.to_string();
    CHECK(oracle::least_rotation_string(s) == s);
    for (std::size_t r = 0; r < s.size(); ++r) {
      CHECK(CyclicWord::parse(s.substr(r) + s.substr(0, r)) == c);
    }
    CHECK(c.inverse().to_string() == oracle::least_rotation_string(oracle::invert_string(s)));
  }
}

TEST_CASE("census examples") {
  const auto ab5 = cyc({"ababababab"});
  const SubwordCensus c = census(ab5, 2);
  CHECK(c.total_length == 10);
  CHECK(c.counts.size() == 2);
  CHECK(c.counts.at(Word::parse("ab")) == 5);
  CHECK(c.counts.at(Word::parse("ba")) == 5);

  const SubwordCensus d = census(cyc({"abAB"}), 1);
  CHECK(d.counts.size() == 4);
  for (const auto& [w, n] : d.counts) CHECK(n == 1);

  CHECK(reduced_word_count(2, 2) == 12);
  CHECK(all_reduced_words(2, 2).size() == 12);
  CHECK(all_reduced_words(3, 3).size() == reduced_word_count(3, 3));
}

TEST_CASE("census matches direct cyclic enumeration") {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int rank = 1 + static_cast<int>(uniform_below(rng, 3));
    const int T = 1 + static_cast<int>(uniform_below(rng, 5));
    std::vector<CyclicWord> chain;
    std::map<std::string, std::uint64_t> expected;
    std::uint64_t total = 0;
    for (std::uint64_t c = 0, n = 1 + uniform_below(rng, 3); c < n; ++c) {
      const CyclicWord w = cyclic_reduce(sample_reduced_word(1 + uniform_below(rng, 12), rank, rng)).core;
      chain.push_back(w);
      const std::string s = w.to_string();
      std::string wrapped;
      while (wrapped.size() < s.size() + T) wrapped += s;
      for (std::size_t i = 0; i < s.size(); ++i) ++expected[wrapped.substr(i, T)];
      total += s.size();
    }
    const SubwordCensus got = census(chain, T);
    CHECK(got.total_length == total);
    std::map<std::string, std::uint64_t> as_strings;
    for (const auto& [w, n] : got.counts) {
      CHECK(w.size() == static_cast<std::size_t>(T));
      CHECK(is_reduced(w.letters()));
      as_strings[w.to_string()] = n;
    }
    CHECK(as_strings == expected);
  }
}

TEST_CASE("is_pseudorandom examples") {
  const std::string m = power("ab", 20);
  for (double eps : {0.0, 0.3, 0.9, 0.999}) {
    CHECK_FALSE(is_pseudorandom(cyc({m.c_str()}), 2, {2, eps}).pseudorandom);
  }
  const auto r = is_pseudorandom(cyc({m.c_str()}), 2, {2, 0.5});
  CHECK((r.worst.to_string() == "ab" || r.worst.to_string() == "ba"));
  CHECK(r.worst_ratio == doctest::Approx(6.0));

  const auto commutator = is_pseudorandom(cyc({"abAB"}), 2, {1, 0.0});
  CHECK(commutator.pseudorandom);
  CHECK(commutator.worst_ratio == doctest::Approx(1.0));
}

TEST_CASE("homological triviality") {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const Word g = sample_reduced_word(1 + uniform_below(rng, 30), 3, rng);
    const std::array<Word, 2> chain{g, g.inverse()};
    CHECK(is_homologically_trivial(std::span<const Word>(chain), 3));
  }
  CHECK(is_homologically_trivial(cyc({"abAB"}), 2));
  CHECK_FALSE(is_homologically_trivial(cyc({"ab"}), 2));
  CHECK(abelianize(Word::parse("ab"), 2) == std::vector<long>{1, 1});
  CHECK(abelianize(Word::parse("aaB"), 2) == std::vector<long>{2, -1});
}

TEST_CASE("sample_reduced_word") {
  Rng rng(16);
  CHECK(sample_reduced_word(0, 2, rng).empty());
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = uniform_below(rng, 60);
    const Word w = sample_reduced_word(n, 2, rng);
    CHECK(w.size() == n);
    CHECK(is_reduced(w.letters()));
  }
  Rng a(99), b(99);
  CHECK(sample_reduced_word(50, 3, a) == sample_reduced_word(50, 3, b));
}

TEST_CASE("sample_reduced_word is uniform at n = 1 and n = 2") {
  // Chi-square critical values at significance 0.01: 3 dof 11.345, 11 dof 24.725.
  Rng rng(17);
  std::map<std::string, int> ones, twos;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    ++ones[sample_reduced_word(1, 2, rng).to_string()];
    ++twos[sample_reduced_word(2, 2, rng).to_string()];
  }
  auto chi2 = [&](const std::map<std::string, int>& counts, int cells) {
    const double expect = static_cast<double>(draws) / cells;
    double s = 0;
    for (const auto& [w, n] : counts) s += (n - expect) * (n - expect) / expect;
    return s;
  };
  CHECK(ones.size() == 4);
  CHECK(twos.size() == 12);
  CHECK(chi2(ones, 4) < 11.345);
  CHECK(chi2(twos, 12) < 24.725);
}
