#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "primechain/chains.hpp"
#include "primechain/errors.hpp"
#include "primechain/interval.hpp"
#include "primechain/primality.hpp"
#include "primechain/rational.hpp"

namespace primechain::trees {

/// Parent of q under the inverse growth map: the nearest integer to q^(1/e),
/// computed from a certified enclosure with precision escalation. The map
/// never lands on a half-integer (that would force (2m+1)^num = 2^num * q^den,
/// odd = even), so escalation always decides.
inline std::uint64_t parent(std::uint64_t q, const RationalExponent& e,
                            const PrecisionPolicy& policy = {}) {
  if (q < 2) throw domain_error("parent: q must be >= 2");
  policy.validate();
  mpfr_prec_t prec = std::max<mpfr_prec_t>(96, policy.start_bits);
  while (true) {
    const RealInterval x = RealInterval::from_integer(mpz_class(q), prec);
    const RealInterval r = nth_root(pow_integer(x, e.den), e.num);
    if (const auto m = round_nearest(r)) {
      if (!m->fits_ulong_p()) throw domain_error("parent: result exceeds machine word");
      return mpz_get_ui(m->get_mpz_t());
    }
    if (prec >= policy.max_bits)
      throw precision_error("parent: undecided at maximum precision for q=" + std::to_string(q));
    prec = policy.next(prec);
  }
}

/// The forest of primes up to `limit` under the ancestry q -> parent(q).
/// A prime is a root when its parent is not a prime below the limit (or is
/// itself); otherwise it hangs under that parent prime.
struct PrimeForest {
  RationalExponent exponent;
  std::uint64_t limit = 0;
  std::map<std::uint64_t, std::uint64_t> parent_of;         // every prime <= limit -> parent value
  std::vector<std::uint64_t> roots;                          // ascending
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;  // (parent, child), parent prime
};

struct ForestStats {
  std::size_t prime_count = 0;
  std::size_t root_count = 0;
  std::size_t max_depth = 0;   // edges on the longest root-to-leaf path
  std::size_t orphan_count = 0;  // primes whose ancestry never reaches a root
  std::vector<std::pair<std::uint64_t, std::size_t>> tree_sizes;  // root -> node count
};

namespace detail {

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  if (limit > (1ull << 27))
    throw resource_error("forest limit beyond 2^27 is not a desk-scale sieve");
  std::vector<bool> comp(static_cast<std::size_t>(limit) + 1, false);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (comp[static_cast<std::size_t>(i)]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) comp[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

}  // namespace detail

inline PrimeForest build_forest(std::uint64_t limit, const RationalExponent& e,
                                const PrecisionPolicy& policy = {}) {
  if (limit < 2) throw domain_error("forest limit must be >= 2");
  if (e.is_identity()) throw domain_error("forest exponent must exceed 1");
  PrimeForest f;
  f.exponent = e;
  f.limit = limit;
  const auto primes = detail::primes_up_to(limit);
  std::vector<bool> is_prime(static_cast<std::size_t>(limit) + 1, false);
  for (const auto p : primes) is_prime[static_cast<std::size_t>(p)] = true;

  for (const auto q : primes) {
    const std::uint64_t par = parent(q, e, policy);
    f.parent_of[q] = par;
    // parent(q) <= round(q^(1/e)) < q for q >= 2 and e > 1, except tiny
    // self-maps; anything that is not a smaller prime in range roots a tree.
    if (par == q || par < 2 || par > limit || !is_prime[static_cast<std::size_t>(par)]) {
      f.roots.push_back(q);
    } else {
      f.edges.emplace_back(par, q);
    }
  }
  return f;
}

inline ForestStats forest_stats(const PrimeForest& f) {
  ForestStats s;
  s.prime_count = f.parent_of.size();
  s.root_count = f.roots.size();

  std::map<std::uint64_t, std::uint64_t> tree_root;  // prime -> its root
  std::map<std::uint64_t, std::size_t> depth;
  const auto is_root = [&](std::uint64_t q) {
    return std::binary_search(f.roots.begin(), f.roots.end(), q);
  };
  for (const auto& [q, par] : f.parent_of) {
    // Walk to a root, memoizing; chains strictly decrease so this terminates.
    std::vector<std::uint64_t> path;
    std::uint64_t cur = q;
    bool reached = false;
    while (true) {
      if (depth.count(cur)) {
        reached = true;
        break;
      }
      path.push_back(cur);
      if (is_root(cur)) {
        depth[cur] = 0;
        tree_root[cur] = cur;
        reached = true;
        break;
      }
      const auto it = f.parent_of.find(cur);
      if (it == f.parent_of.end()) break;  // ancestry leaves the prime set: orphan
      cur = it->second;
    }
    if (!reached) {
      ++s.orphan_count;
      continue;
    }
    // unwind the memo along the path
    if (!path.empty() && is_root(path.back())) path.pop_back();
    std::size_t d = depth[cur];
    std::uint64_t root = tree_root[cur];
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      depth[*it] = ++d;
      tree_root[*it] = root;
    }
  }

  std::map<std::uint64_t, std::size_t> sizes;
  for (const auto& [q, root] : tree_root) {
    (void)q;
    ++sizes[root];
  }
  for (const auto& [q, d] : depth) {
    (void)q;
    s.max_depth = std::max(s.max_depth, d);
  }
  s.tree_sizes.assign(sizes.begin(), sizes.end());
  return s;
}

/// The ancestor chain of q inside the forest, root first.
inline std::vector<std::uint64_t> ancestry(const PrimeForest& f, std::uint64_t q) {
  std::vector<std::uint64_t> path;
  std::uint64_t cur = q;
  while (true) {
    path.push_back(cur);
    if (std::binary_search(f.roots.begin(), f.roots.end(), cur)) break;
    const auto it = f.parent_of.find(cur);
    if (it == f.parent_of.end()) break;
    cur = it->second;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// GraphViz rendering: one subgraph per tree, edges parent -> child, ordered
/// ascending so output is deterministic.
inline std::string export_dot(const PrimeForest& f) {
  std::ostringstream out;
  out << "digraph prime_forest {\n";
  out << "  // exponent " << f.exponent.str() << ", primes up to " << f.limit << "\n";
  std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, std::uint64_t>>> by_root;
  std::map<std::uint64_t, std::uint64_t> root_of;
  for (const auto r : f.roots) root_of[r] = r;
  // edges are emitted in ascending child order; resolve each child's root
  for (const auto& [par, child] : f.edges) {
    const auto it = root_of.find(par);
    const std::uint64_t root = it != root_of.end() ? it->second : par;
    root_of[child] = root;
    by_root[root].emplace_back(par, child);
  }
  for (const auto r : f.roots) {
    out << "  subgraph tree_" << r << " {\n";
    const auto it = by_root.find(r);
    if (it == by_root.end()) {
      out << "    " << r << ";\n";
    } else {
      for (const auto& [par, child] : it->second)
        out << "    " << par << " -> " << child << ";\n";
    }
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace primechain::trees
