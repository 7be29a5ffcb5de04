#include "doctest.h"

#include "wheelhouse/species.hpp"

using namespace wheelhouse;

namespace {

// one-dimensional components with trivial action (the species of uCom)
ExplicitSpecies trivial_species(int maxn, bool reduced, bool with_empty) {
  ExplicitSpecies s(reduced ? "Com" : "uCom", maxn);
  for (int n = with_empty ? 0 : 1; n <= maxn; ++n) {
    if (reduced && n == 0) continue;
    s.add_tag(n, {"c" + std::to_string(n), 0, 0});
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      if (s.dim(n)) s.gen[n][g].set(0, 0, Rational(1));
      s.gen[n][g].finish();
    }
  }
  return s;
}

std::string word_key(const std::vector<int>& w) {
  std::string k = "w";
  for (int x : w) k += std::to_string(x);
  return k;
}

// basis = words in the letters 1..n, each used once (the species of uAss)
ExplicitSpecies assoc_species(int maxn, bool with_empty) {
  ExplicitSpecies s("uAss", maxn);
  std::vector<std::vector<std::vector<int>>> words(maxn + 1);
  for (int n = with_empty ? 0 : 1; n <= maxn; ++n) {
    std::vector<int> w(n);
    for (int i = 0; i < n; ++i) w[i] = i + 1;
    do {
      words[n].push_back(w);
      s.add_tag(n, {word_key(w), 0, 0});
    } while (std::next_permutation(w.begin(), w.end()));
  }
  for (int n = 0; n <= maxn; ++n) {
    s.alloc_gen(n);
    for (int g = 0; g + 1 < n; ++g) {
      for (std::size_t e = 0; e < words[n].size(); ++e) {
        std::vector<int> w = words[n][e];
        for (auto& x : w) {
          if (x == g + 1)
            x = g + 2;
          else if (x == g + 2)
            x = g + 1;
        }
        s.gen[n][g].set(s.find(n, word_key(w)), static_cast<int>(e), Rational(1));
      }
      s.gen[n][g].finish();
    }
  }
  return s;
}

}  // namespace

TEST_CASE("cauchy product dimensions and units") {
  Truncation t{6, 10, 10};
  ExplicitSpecies one = unit_compose(6);  // the species supported at singletons
  ExplicitSpecies unit = unit_cauchy(6);  // the Cauchy unit
  ExplicitSpecies p = cauchy(one, one, t);
  CHECK(p.dim(2) == 2);  // two ordered singleton decompositions
  CHECK(p.dim(1) == 0);
  CHECK(p.dim(3) == 0);
  p.validate();

  ExplicitSpecies ucom = trivial_species(6, false, true);
  ExplicitSpecies uass = assoc_species(5, true);
  ExplicitSpecies lhs = cauchy(unit, uass, t);
  for (int n = 0; n <= 5; ++n) CHECK(lhs.dim(n) == uass.dim(n));  // 1 (x) S = S

  // dim((A(x)B)(n)) = sum C(n,k) dim A(k) dim B(n-k)
  ExplicitSpecies prod = cauchy(ucom, uass, t);
  for (int n = 0; n <= 5; ++n) {
    long long expect = 0;
    for (int k = 0; k <= n; ++k) {
      long long c = 1;
      for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
      expect += c * ucom.dim(k) * uass.dim(n - k);
    }
    CHECK(prod.dim(n) == expect);
  }
  CHECK(prod.dim(2) == 5);  // (uCom (x) uAss)(2)
  prod.validate();

  // associativity of the Cauchy product, dimensionwise
  Truncation t4{4, 10, 10};
  ExplicitSpecies ab_c = cauchy(cauchy(ucom, uass, t4), one, t4);
  ExplicitSpecies a_bc = cauchy(ucom, cauchy(uass, one, t4), t4);
  for (int n = 0; n <= 4; ++n) CHECK(ab_c.dim(n) == a_bc.dim(n));
}

TEST_CASE("derivative") {
  ExplicitSpecies ucom = trivial_species(6, false, true);
  ExplicitSpecies dcom = derivative(ucom);
  for (int n = 0; n <= 5; ++n) CHECK(dcom.dim(n) == 1);
  ExplicitSpecies uass = assoc_species(4, true);
  ExplicitSpecies dass = derivative(uass);
  CHECK(dass.dim(2) == 6);  // Ass(3)

  // Leibniz rule dimensionwise: d(A(x)B) = dA(x)B + A(x)dB
  Truncation t{4, 10, 10};
  ExplicitSpecies prod = cauchy(ucom, uass, Truncation{5, 10, 10});
  ExplicitSpecies dprod = derivative(prod);
  ExplicitSpecies s1 = cauchy(dcom, uass, t);
  ExplicitSpecies s2 = cauchy(ucom, dass, t);
  for (int n = 0; n <= 3; ++n) CHECK(dprod.dim(n) == s1.dim(n) + s2.dim(n));
}

TEST_CASE("composition product") {
  Truncation t{6, 10, 10};
  ExplicitSpecies com = trivial_species(6, true, false);  // reduced: Com
  ExplicitSpecies cc = compose_species(com, com, t);
  CHECK(cc.dim(3) == 5);  // set partitions of a 3-set with nested labels
  cc.validate();

  ExplicitSpecies one = unit_compose(6);
  ExplicitSpecies uass = assoc_species(5, false);
  ExplicitSpecies right_unit = compose_species(uass, one, t);
  ExplicitSpecies left_unit = compose_species(one, uass, t);
  for (int n = 1; n <= 5; ++n) {
    CHECK(right_unit.dim(n) == uass.dim(n));
    CHECK(left_unit.dim(n) == uass.dim(n));
  }

  // associativity dimensionwise at small truncation
  Truncation t4{4, 10, 10};
  ExplicitSpecies lhs = compose_species(compose_species(com, com, t4), com, t4);
  ExplicitSpecies rhs = compose_species(com, compose_species(com, com, t4), t4);
  for (int n = 1; n <= 4; ++n) CHECK(lhs.dim(n) == rhs.dim(n));
}

TEST_CASE("cyclic words of the singleton species") {
  Truncation t{6, 12, 12};
  ExplicitSpecies sone = suspend(unit_compose(6), 1);
  ExplicitSpecies c = cyc(sone, t);
  CHECK(c.dim(1) == 1);
  c.validate();
  // brute-force oracle: dim = n! - rank(1 - signed rotation) on words
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::vector<int>> words;
    std::vector<int> w(n);
    for (int i = 0; i < n; ++i) w[i] = i + 1;
    do words.push_back(w);
    while (std::next_permutation(w.begin(), w.end()));
    auto idx = [&](const std::vector<int>& v) {
      return static_cast<int>(std::lower_bound(words.begin(), words.end(), v) - words.begin());
    };
    SparseMat m(static_cast<int>(words.size()), static_cast<int>(words.size()));
    int rot_sign = (n - 1) % 2 ? -1 : 1;  // degree-1 letters
    for (std::size_t e = 0; e < words.size(); ++e) {
      std::vector<int> r = words[e];
      std::rotate(r.rbegin(), r.rbegin() + 1, r.rend());
      m.set(static_cast<int>(e), static_cast<int>(e), Rational(1));
      m.set(static_cast<int>(e), idx(r), Rational(-rot_sign));
    }
    m.finish();
    int expect = static_cast<int>(words.size()) - rank(m);
    CHECK(c.dim(n) == expect);
    long long fact = 1;
    for (int i = 2; i < n; ++i) fact *= i;
    CHECK(c.dim(n) == fact);  // (n-1)!
  }
  // unsuspended: Cyc(1)(n) = (n-1)! in degree zero
  ExplicitSpecies c0 = cyc(unit_compose(6), t);
  long long fact = 1;
  for (int n = 1; n <= 6; ++n) {
    CHECK(c0.dim(n) == fact);
    for (int i = 0; i < c0.dim(n); ++i) CHECK(c0.comp[n][i].degree == 0);
    fact *= n;
  }
}

TEST_CASE("cyclic words of an arity-zero odd letter") {
  // one letter of degree 1 at the empty set: even-length cycles die
  Truncation t{0, 8, 8};
  ExplicitSpecies a = unit_cauchy(0, 1, 0, "sa");
  ExplicitSpecies c = cyc(a, t);
  std::map<int, int> by_deg;
  for (auto& tag : c.comp[0]) ++by_deg[tag.degree];
  for (int l = 1; l <= 7; ++l) CHECK(by_deg[l] == (l % 2 ? 1 : 0));
}

TEST_CASE("symmetric powers and koszul kills") {
  Truncation t{4, 8, 8};
  ExplicitSpecies sone = suspend(unit_compose(4), 1);
  ExplicitSpecies s2 = sym_power(sone, 2, t);
  CHECK(s2.dim(2) == 1);  // {1}{2} multiset, blocks distinct
  s2.validate();

  // odd arity-zero letter squares to zero
  ExplicitSpecies odd0 = unit_cauchy(0, 1, 0, "x1");
  CHECK(sym_power(odd0, 2, Truncation{0, 8, 8}).dim(0) == 0);
  CHECK(sym_power(odd0, 1, Truncation{0, 8, 8}).dim(0) == 1);

  // even arity-zero letter does not
  ExplicitSpecies even0 = unit_cauchy(0, 2, 0, "x2");
  CHECK(sym_power(even0, 2, Truncation{0, 8, 8}).dim(0) == 1);

  // exterior algebra on two odd generators: one class in degrees 0,1,3,4
  ExplicitSpecies two = direct_sum(unit_cauchy(0, 1, 0, "x1"), unit_cauchy(0, 3, 0, "x3"));
  ExplicitSpecies lam = sym_all(two, Truncation{0, 6, 6});
  std::map<int, int> by_deg;
  for (auto& tag : lam.comp[0]) ++by_deg[tag.degree];
  CHECK(by_deg[0] == 1);
  CHECK(by_deg[1] == 1);
  CHECK(by_deg[3] == 1);
  CHECK(by_deg[4] == 1);
  CHECK(by_deg[2] == 0);
}

TEST_CASE("tensor power with factor swaps") {
  Truncation t{4, 8, 8};
  ExplicitSpecies sone = suspend(unit_compose(4), 1);
  TensorPowerSpecies tp = tensor_power(sone, 2, t);
  CHECK(tp.sp.dim(2) == 2);
  // the swap acts with sign -1 between two odd letters
  const SparseMat& sw = tp.factor_swap[2][0];
  CHECK(sw.get(0, 1) == Rational(-1));
  CHECK(sw.get(1, 0) == Rational(-1));
  tp.sp.validate();
}

TEST_CASE("suspension shifts degrees") {
  ExplicitSpecies s = suspend(suspend(unit_compose(3), 1), -1);
  CHECK(s.comp[1][0].degree == 0);
  ExplicitSpecies up = suspend(assoc_species(3, false), 1);
  for (int n = 1; n <= 3; ++n)
    for (auto& tag : up.comp[n]) CHECK(tag.degree == 1);
}
