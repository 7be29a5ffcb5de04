#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wheelhouse/bigint.hpp"

namespace wheelhouse {

// Permutation of {0..n-1}; p[i] is the image of i.
using Perm = std::vector<int>;

inline Perm perm_identity(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}
inline Perm perm_compose(const Perm& p, const Perm& q) {
  // (p*q)[i] = p[q[i]]
  Perm r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
  return r;
}
inline Perm perm_inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}
inline int perm_sign(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  int sgn = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = 1;
      ++len;
    }
    if (len % 2 == 0) sgn = -sgn;
  }
  return sgn;
}
// Adjacent transposition (i, i+1), 0-based.
inline Perm perm_transposition(int n, int i) {
  Perm p = perm_identity(n);
  std::swap(p[i], p[i + 1]);
  return p;
}
inline std::vector<int> cycle_type(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  std::vector<int> t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = 1;
      ++len;
    }
    t.push_back(len);
  }
  std::sort(t.rbegin(), t.rend());
  return t;
}
// Factors p into adjacent transpositions (left to right composition order:
// p = t_1 * t_2 * ... * t_k with perm_compose).
inline std::vector<int> perm_reduced_word(Perm p) {
  std::vector<int> word;
  int n = static_cast<int>(p.size());
  // bubble to identity, recording swaps; p = (product of recorded swaps) read back
  for (;;) {
    bool done = true;
    for (int i = 0; i + 1 < n; ++i) {
      if (p[i] > p[i + 1]) {
        std::swap(p[i], p[i + 1]);
        word.push_back(i);
        done = false;
      }
    }
    if (done) break;
  }
  std::reverse(word.begin(), word.end());
  return word;
}

// Partition: weakly decreasing positive parts.
using Partition = std::vector<int>;

inline int partition_sum(const Partition& p) {
  return std::accumulate(p.begin(), p.end(), 0);
}

inline void gen_partitions(int n, int maxPart, Partition& cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int k = std::min(n, maxPart); k >= 1; --k) {
    cur.push_back(k);
    gen_partitions(n - k, k, cur, out);
    cur.pop_back();
  }
}

// All partitions of n, lexicographically decreasing from (n) to (1^n).
inline std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  Partition cur;
  gen_partitions(n, n, cur, out);
  return out;
}

inline std::string partition_to_string(const Partition& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

inline Partition parse_partition(const std::string& s) {
  Partition p;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) p.push_back(std::stoi(cur)), cur.clear();
    } else if (c >= '0' && c <= '9') {
      cur.push_back(c);
    } else if (c != '(' && c != ')') {
      throw std::invalid_argument("bad partition literal");
    }
  }
  if (!cur.empty()) p.push_back(std::stoi(cur));
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i] < p[i + 1]) throw std::invalid_argument("partition parts must decrease");
  return p;
}

// Hook length formula.
inline long long partition_dim(const Partition& p) {
  int n = partition_sum(p);
  if (n == 0) return 1;
  long long numer = 1;
  for (int i = 2; i <= n; ++i) numer *= i;
  long long hooks = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int j = 0; j < p[i]; ++j) {
      int arm = p[i] - j - 1;
      int leg = 0;
      for (std::size_t k = i + 1; k < p.size(); ++k)
        if (p[k] > j) ++leg;
      hooks *= (arm + leg + 1);
    }
  }
  return numer / hooks;
}

// Murnaghan-Nakayama: character of the irreducible S_n-module S^lambda at a
// permutation of cycle type mu. Border strips removed via beta-numbers:
// beta_i = lambda_i + (m-1-i); a strip of length k removable at i iff
// beta_i - k >= 0 and beta_i - k is not a beta-number; its height is the
// number of beta-numbers strictly between the old and new value.
inline long long mn_character(const Partition& lambda, const Partition& mu) {
  if (partition_sum(lambda) != partition_sum(mu))
    throw std::invalid_argument("mn_character: size mismatch");
  if (lambda.empty()) return 1;
  int k = mu[0];
  Partition rest(mu.begin() + 1, mu.end());
  int m = static_cast<int>(lambda.size());
  std::vector<int> beta(m);
  for (int i = 0; i < m; ++i) beta[i] = lambda[i] + (m - 1 - i);
  long long total = 0;
  for (int i = 0; i < m; ++i) {
    int nb = beta[i] - k;
    if (nb < 0) continue;
    bool clash = false;
    int height = 0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      if (beta[j] == nb) clash = true;
      if (beta[j] > nb && beta[j] < beta[i]) ++height;
    }
    if (clash) continue;
    std::vector<int> nbeta = beta;
    nbeta[i] = nb;
    std::sort(nbeta.rbegin(), nbeta.rend());
    Partition lam;
    for (int j = 0; j < m; ++j) {
      int part = nbeta[j] - (m - 1 - j);
      if (part > 0) lam.push_back(part);
    }
    total += (height % 2 ? -1 : 1) * mn_character(lam, rest);
  }
  return total;
}

// Character table of S_n: table[l][m] = chi_{lambda_l}(class mu_m), rows and
// columns indexed by partitions_of(n) order. Cached, safe for concurrent
// reads after first initialization.
class CharacterTables {
public:
  struct Table {
    std::vector<Partition> parts;
    std::vector<std::vector<long long>> chi;
    std::vector<long long> class_size;
    std::vector<long long> dims;
  };

  static const Table& get(int n) {
    static std::mutex mu;
    static std::map<int, Table> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Table t;
    t.parts = partitions_of(n);
    std::size_t m = t.parts.size();
    t.chi.assign(m, std::vector<long long>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) t.chi[i][j] = mn_character(t.parts[i], t.parts[j]);
    long long nfact = 1;
    for (int i = 2; i <= n; ++i) nfact *= i;
    for (std::size_t j = 0; j < m; ++j) {
      std::map<int, int> freq;
      for (int part : t.parts[j]) ++freq[part];
      long long z = 1;
      for (auto& [len, cnt] : freq) {
        for (int c = 1; c <= cnt; ++c) z *= len * c;
      }
      t.class_size.push_back(nfact / z);
    }
    for (std::size_t i = 0; i < m; ++i) t.dims.push_back(partition_dim(t.parts[i]));
    return cache.emplace(n, std::move(t)).first->second;
  }
};

}  // namespace wheelhouse
