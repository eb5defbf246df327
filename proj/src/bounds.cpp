#include "bmf/bounds.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>
#include <set>

#include "bmf/random.hpp"

namespace bmf {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> signed_weights(const WeightedInstance& inst) {
  const std::size_t n = inst.rows();
  const std::size_t m = inst.cols();
  std::vector<double> h(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      h[i * m + j] = (inst.matrix.get(i, j) ? 1.0 : -1.0) * inst.weight(i, j);
    }
  }
  return h;
}

}  // namespace

Factorisation k_greedy(const WeightedInstance& inst, std::size_t k,
                       const KGreedyOptions& options) {
  if (k == 0) throw std::invalid_argument("k_greedy: k must be >= 1");
  const std::size_t n = inst.rows();
  const std::size_t m = inst.cols();
  std::vector<double> h = signed_weights(inst);
  const double big_k = inst.ones_weight();

  Factorisation f;
  f.k = k;
  for (std::size_t round = 0; round < k; ++round) {
    BbqpInstance bi(n, m, h);
    BbqpSolution sol;
    if (options.transposed) {
      const BbqpInstance t = bi.transposed();
      OrderingStrategy strategy = options.ordering;
      strategy.seed = derive_seed(options.ordering.seed, round);
      sol = alternate(t, greedy(t, build_ordering(t, strategy))).transposed();
    } else {
      OrderingStrategy strategy = options.ordering;
      strategy.seed = derive_seed(options.ordering.seed, round);
      sol = alternate(bi, greedy(bi, build_ordering(bi, strategy)));
    }
    if (sol.empty() || sol.value <= kValueTol) break;
    const double replacement =
        options.arithmetic == Arithmetic::boolean ? 0.0 : -big_k;
    for (std::size_t i = 0; i < n; ++i) {
      if (!sol.a[i]) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (sol.b[j]) h[i * m + j] = replacement;
      }
    }
    f.columns.push_back(inst.column(SupportSet::from_indicator(sol.a),
                                    SupportSet::from_indicator(sol.b)));
  }
  return f;
}

Factorisation k_greedy(const BinaryMatrix& x, std::size_t k,
                       Arithmetic arithmetic) {
  KGreedyOptions options;
  options.arithmetic = arithmetic;
  return k_greedy(WeightedInstance::unreduced(x), k, options);
}

WarmStart k_greedy_warm_start(const WeightedInstance& inst, std::size_t k,
                              std::uint64_t seed, std::size_t n_random) {
  std::vector<KGreedyOptions> runs;
  for (bool transposed : {false, true}) {
    for (OrderingKind kind : {OrderingKind::original, OrderingKind::revised,
                              OrderingKind::original_perturbed,
                              OrderingKind::revised_perturbed}) {
      runs.push_back({{kind, derive_seed(seed, runs.size())}, transposed,
                      Arithmetic::boolean});
    }
  }
  for (std::size_t r = 0; r < n_random; ++r) {
    runs.push_back({{OrderingKind::random, derive_seed(seed, runs.size())},
                    r % 2 == 1, Arithmetic::boolean});
  }

  WarmStart out;
  std::set<Rank1Column> seen;
  bool have_best = false;
  for (const auto& options : runs) {
    Factorisation f = k_greedy(inst, k, options);
    const std::uint64_t err = weighted_error(inst, f);
    if (!have_best || err < out.best_error) {
      out.best = f;
      out.best_error = err;
      have_best = true;
    }
    for (auto& c : f.columns) {
      if (seen.insert(c).second) out.columns.push_back(c);
    }
  }
  return out;
}

bool is_isolated_set(const BinaryMatrix& x, const std::vector<Entry>& entries) {
  for (const auto& [i, j] : entries) {
    if (i >= x.rows() || j >= x.cols() || !x.get(i, j)) return false;
  }
  for (std::size_t s = 0; s < entries.size(); ++s) {
    for (std::size_t t = s + 1; t < entries.size(); ++t) {
      const auto [i1, j1] = entries[s];
      const auto [i2, j2] = entries[t];
      if (i1 == i2 || j1 == j2) return false;
      if (x.get(i1, j2) && x.get(i2, j1)) return false;
    }
  }
  return true;
}

namespace {

bool compatible(const BinaryMatrix& x, Entry p, Entry q) {
  return p.first != q.first && p.second != q.second &&
         !(x.get(p.first, q.second) && x.get(q.first, p.second));
}

std::vector<Entry> ones_of(const BinaryMatrix& x) {
  std::vector<Entry> e;
  for (std::uint32_t i = 0; i < x.rows(); ++i) {
    for (std::uint32_t j = 0; j < x.cols(); ++j) {
      if (x.get(i, j)) e.emplace_back(i, j);
    }
  }
  return e;
}

}  // namespace

IsolatedSet isolation_greedy(const BinaryMatrix& x, std::uint64_t seed) {
  std::vector<Entry> candidates = ones_of(x);
  Rng rng(seed);
  rng.shuffle(std::span(candidates));
  IsolatedSet s;
  for (const Entry& e : candidates) {
    const bool ok = std::all_of(s.entries.begin(), s.entries.end(),
                                [&](const Entry& f) { return compatible(x, e, f); });
    if (ok) s.entries.push_back(e);
  }
  if (!is_isolated_set(x, s.entries)) {
    throw std::logic_error("isolation_greedy produced an invalid set");
  }
  return s;
}

namespace {

// Maximum clique over the compatibility graph of the ones, with greedy
// colouring bounds and a distinct-rows/distinct-columns bound.
class IsolationSearch {
 public:
  using Bits = std::vector<std::uint64_t>;

  IsolationSearch(const BinaryMatrix& x, double time_cap)
      : x_(x), vertices_(ones_of(x)), time_cap_(time_cap),
        start_(Clock::now()) {
    const std::size_t nv = vertices_.size();
    words_ = (nv + 63) / 64;
    adj_.assign(nv, Bits(words_, 0));
    for (std::size_t a = 0; a < nv; ++a) {
      for (std::size_t b = a + 1; b < nv; ++b) {
        if (compatible(x_, vertices_[a], vertices_[b])) {
          adj_[a][b / 64] |= std::uint64_t{1} << (b % 64);
          adj_[b][a / 64] |= std::uint64_t{1} << (a % 64);
        }
      }
    }
  }

  void seed_incumbent(const std::vector<Entry>& entries) {
    if (entries.size() > best_.size()) best_ = entries;
  }

  bool run() {
    Bits all(words_, 0);
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      all[v / 64] |= std::uint64_t{1} << (v % 64);
    }
    std::vector<std::size_t> current;
    expand(current, all);
    return !timed_out_;
  }

  const std::vector<Entry>& best() const { return best_; }
  std::size_t nodes() const { return nodes_; }

 private:
  static std::size_t count(const Bits& b) {
    std::size_t c = 0;
    for (auto w : b) c += std::popcount(w);
    return c;
  }

  std::size_t line_bound(const Bits& p) const {
    std::vector<std::uint8_t> rows(x_.rows(), 0), cols(x_.cols(), 0);
    std::size_t nr = 0, nc = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      for (std::uint64_t bits = p[w]; bits; bits &= bits - 1) {
        const std::size_t v = w * 64 + std::countr_zero(bits);
        if (!rows[vertices_[v].first]++) ++nr;
        if (!cols[vertices_[v].second]++) ++nc;
      }
    }
    return std::min(nr, nc);
  }

  void expand(std::vector<std::size_t>& current, Bits p) {
    ++nodes_;
    if (time_cap_ >= 0 && (nodes_ & 1023) == 0 &&
        std::chrono::duration<double>(Clock::now() - start_).count() > time_cap_) {
      timed_out_ = true;
    }
    if (timed_out_) return;
    if (current.size() + line_bound(p) <= best_.size()) return;

    // Greedy colouring of p; order[] lists vertices by colour class.
    std::vector<std::size_t> order;
    std::vector<std::size_t> colour;
    Bits uncoloured = p;
    std::size_t k = 0;
    while (count(uncoloured) > 0) {
      ++k;
      Bits q = uncoloured;
      for (std::size_t w = 0; w < words_; ++w) {
        while (q[w]) {
          const std::size_t v = w * 64 + std::countr_zero(q[w]);
          q[w] &= q[w] - 1;
          uncoloured[v / 64] &= ~(std::uint64_t{1} << (v % 64));
          for (std::size_t u = 0; u < words_; ++u) q[u] &= ~adj_[v][u];
          order.push_back(v);
          colour.push_back(k);
        }
      }
    }
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (current.size() + colour[idx] <= best_.size()) return;
      const std::size_t v = order[idx];
      current.push_back(v);
      Bits next(words_);
      bool any = false;
      for (std::size_t w = 0; w < words_; ++w) {
        next[w] = p[w] & adj_[v][w];
        any |= next[w] != 0;
      }
      if (!any) {
        if (current.size() > best_.size()) {
          best_.clear();
          for (std::size_t u : current) best_.push_back(vertices_[u]);
        }
      } else {
        expand(current, std::move(next));
      }
      current.pop_back();
      if (timed_out_) return;
      p[v / 64] &= ~(std::uint64_t{1} << (v % 64));
    }
  }

  const BinaryMatrix& x_;
  std::vector<Entry> vertices_;
  std::size_t words_ = 0;
  std::vector<Bits> adj_;
  std::vector<Entry> best_;
  double time_cap_;
  Clock::time_point start_;
  std::size_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace

IsolationResult isolation_exact(const BinaryMatrix& x, double time_cap_secs) {
  IsolationResult result;
  if (x.count_ones() == 0) {
    result.proven = true;
    return result;
  }
  // Duplicate rows/columns never both appear in an isolated set, so the
  // search runs on the reduced matrix and maps back to original indices.
  const WeightedInstance inst = reduce(x);
  std::vector<std::uint32_t> row_rep(inst.rows()), col_rep(inst.cols());
  for (std::uint32_t i = x.rows(); i-- > 0;) {
    if (inst.row_backmap[i]) row_rep[*inst.row_backmap[i]] = i;
  }
  for (std::uint32_t j = x.cols(); j-- > 0;) {
    if (inst.col_backmap[j]) col_rep[*inst.col_backmap[j]] = j;
  }

  IsolationSearch search(inst.matrix, time_cap_secs);
  for (std::uint64_t s = 0; s < 8; ++s) {
    search.seed_incumbent(isolation_greedy(inst.matrix, s).entries);
  }
  result.proven = search.run();
  result.nodes = search.nodes();
  for (const auto& [i, j] : search.best()) {
    result.best.entries.emplace_back(row_rep[i], col_rep[j]);
  }
  std::sort(result.best.entries.begin(), result.best.entries.end());
  if (!is_isolated_set(x, result.best.entries)) {
    throw std::logic_error("isolation_exact produced an invalid set");
  }
  return result;
}

}  // namespace bmf
