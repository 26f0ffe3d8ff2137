#include "plectic/harmonize.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <set>

namespace plectic {

namespace {

struct Signed {
  size_t index;
  int sign;
};

std::vector<Signed> star_of(const Tree& T, const Vertex& v) {
  std::vector<Signed> out;
  for (const TreeEdge& e : T.star(v)) {
    int s;
    TreeEdge ee = T.to_even(e, &s);
    out.push_back({T.even_index(ee), s});
  }
  return out;
}

// Parity sign of a vertex: the sum of the orientation signs over its star is sigma (p + 1).
int sigma(const Vertex& v) { return v.dist % 2 == 0 ? 1 : -1; }

i64 mod_norm(i64 x, u64 mod) {
  i64 m = static_cast<i64>(mod);
  x %= m;
  return x < 0 ? x + m : x;
}

u64 mul(u64 a, u64 b, u64 mod) { return mulmod(a, b, mod); }

int val(u64 x, u64 p, u64 mod) {
  if (x % mod == 0) return PadicNumber::kInf;
  int k = 0;
  while (x % p == 0) {
    x /= p;
    ++k;
  }
  return k;
}

int digits_of(u64 mod, u64 p) {
  int k = 0;
  while (mod > 1) {
    if (mod % p != 0) throw Error(ErrorKind::InvalidArgument, "modulus is not a power of p");
    mod /= p;
    ++k;
  }
  return k;
}

// Solve a x = r mod p^M for a of valuation k <= v(r); the representative below p^(M-k).
bool solve_scalar(u64 a, u64 r, u64 p, u64 mod, u64* x) {
  int k = val(a, p, mod);
  if (r % mod == 0) {
    *x = 0;
    return true;
  }
  if (val(r, p, mod) < k) return false;
  u64 pk = ppow(p, k), m2 = mod / pk;
  *x = mul(r / pk % m2, invmod(a / pk % m2, m2), m2);
  return true;
}

}  // namespace

// ------------------------------------------------------------ degenerations

DegenerationTable degenerations(const Cocycle& c, int m, u64 modulus, int threads) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "harmonization needs m >= 1");
  if (modulus == 0) throw Error(ErrorKind::InvalidArgument, "harmonization works modulo a power of p");
  u64 p = c.p();
  digits_of(modulus, p);
  Tree T(p);
  auto V = T.vertices(m - 1);
  auto E = T.even_edges(m);
  DegenerationTable t;
  t.p = p;
  t.m = m;
  t.modulus = modulus;
  for (PhiTable* d : {&t.d1, &t.d2}) {
    d->m = m;
    d->rows = V.size();
    d->cols = E.size();
    d->modulus = modulus;
    d->v.assign(d->rows * d->cols, 0);
  }
  const TreeEdge e0 = T.base_edge();
  std::vector<Signed> st[2] = {star_of(T, T.base()), star_of(T, T.base_hat())};
  std::exception_ptr err;
  int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (size_t r = 0; r < V.size(); ++r) {
    try {
      const Vertex& v = V[r];
      const auto& sv = st[v.dist % 2];
      for (size_t j = 0; j < E.size(); ++j) {
        GroupElement g1 = c.transporter(1, v, E[j]);
        GroupElement g2 = c.transporter(2, v, E[j]);
        i64 s1 = 0, s2 = 0;
        for (const Signed& s : sv) {
          TreeEdge e = T.even_edge_at(s.index);
          s1 += s.sign * c.value(g1, e, e0);
          s2 += s.sign * c.value(g2, e0, e);
        }
        t.d1.v[r * E.size() + j] = mod_norm(s1, modulus);
        t.d2.v[r * E.size() + j] = mod_norm(s2, modulus);
      }
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  // nu conditions on the base vertex pairs; unknowns X0, Y0 (and X1, Y1 for m >= 2).
  int nb = m >= 2 ? 2 : 1;
  const Vertex bases[2] = {T.base(), T.base_hat()};
  auto nu = [&](const PhiTable& d, size_t row, const Vertex& w) {
    i64 s = 0;
    for (const Signed& x : star_of(T, w)) s += x.sign * d.at(row, x.index);
    return s;
  };
  ModSystem sys;
  sys.p = p;
  sys.modulus = modulus;
  sys.cols = 2 * nb;
  u64 inv = invmod((p + 1) % modulus, modulus);
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) {
      i64 r = nu(t.d1, a, bases[b]) - nu(t.d2, b, bases[a]);
      std::vector<std::pair<uint32_t, i64>> row = {{static_cast<uint32_t>(a), mod_norm(sigma(bases[b]), modulus)},
                                                   {static_cast<uint32_t>(nb + b), mod_norm(-sigma(bases[a]), modulus)}};
      sys.rows.push_back(row);
      sys.rhs.push_back(static_cast<i64>(mul(mod_norm(-r, modulus), inv, modulus)));
    }
  sys.rows.push_back({{0, 1}});
  sys.rhs.push_back(0);
  SolveStats st2;
  std::vector<i64> x;
  try {
    x = solve_sparse(sys, &st2);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LiftInconsistent)
      throw Error(ErrorKind::LiftInconsistent, "base values violate the nu conditions");
    throw;
  }
  if (st2.free_vars > 0 || st2.non_unit_pivots > 0)
    throw Error(ErrorKind::DegenerationUnderdetermined, "nu conditions do not determine the base values");
  for (size_t r = 0; r < V.size(); ++r) {
    int par = V[r].dist % 2;
    for (size_t j = 0; j < E.size(); ++j) {
      t.d1.v[r * E.size() + j] = mod_norm(t.d1.v[r * E.size() + j] + x[par], modulus);
      t.d2.v[r * E.size() + j] = mod_norm(t.d2.v[r * E.size() + j] + x[nb + par], modulus);
    }
  }
  t.base = {x[0], nb > 1 ? x[1] : 0, x[nb], nb > 1 ? x[nb + 1] : 0};
  if (nu_defects(t) != 0) throw Error(ErrorKind::LiftInconsistent, "degenerations violate the nu identity");
  return t;
}

DegenerationTable degenerations_of(const FiniteCochain& D) {
  DegenerationTable t;
  t.p = D.p();
  t.m = D.depth();
  t.modulus = D.modulus();
  t.d1 = phi(D, 1);
  t.d2 = phi(D, 2);
  bool hat = t.m >= 2;
  t.base = {t.d1.at(0, 0), hat ? t.d1.at(1, 0) : 0, t.d2.at(0, 0), hat ? t.d2.at(1, 0) : 0};
  return t;
}

DegenerationTable gauge_normalized(const DegenerationTable& t) {
  DegenerationTable r = t;
  Tree T(t.p);
  auto V = T.vertices(t.m - 1);
  i64 shift = -t.d1.at(0, 0);
  auto norm = [&](i64 x) { return t.modulus ? mod_norm(x, t.modulus) : x; };
  for (size_t i = 0; i < V.size(); ++i) {
    i64 s = shift * sigma(V[i]);
    for (size_t j = 0; j < t.d1.cols; ++j) {
      r.d1.v[i * t.d1.cols + j] = norm(r.d1.v[i * t.d1.cols + j] + s);
      r.d2.v[i * t.d2.cols + j] = norm(r.d2.v[i * t.d2.cols + j] + s);
    }
  }
  bool hat = t.m >= 2;
  r.base = {r.d1.at(0, 0), hat ? r.d1.at(1, 0) : 0, r.d2.at(0, 0), hat ? r.d2.at(1, 0) : 0};
  return r;
}

size_t nu_defects(const DegenerationTable& t) {
  Tree T(t.p);
  auto V = T.vertices(t.m - 1);
  std::vector<std::vector<Signed>> stars;
  for (const Vertex& v : V) stars.push_back(star_of(T, v));
  size_t bad = 0;
#pragma omp parallel for reduction(+ : bad) schedule(static)
  for (size_t a = 0; a < V.size(); ++a)
    for (size_t b = 0; b < V.size(); ++b) {
      i64 s = 0;
      for (const Signed& x : stars[b]) s += x.sign * t.d1.at(a, x.index);
      for (const Signed& x : stars[a]) s -= x.sign * t.d2.at(b, x.index);
      if (t.modulus ? mod_norm(s, t.modulus) != 0 : s != 0) ++bad;
    }
  return bad;
}

// ------------------------------------------------------------------ systems

size_t ModSystem::nonzeros() const {
  size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

nlohmann::json SolveStats::to_json() const {
  return {{"rows", rows},         {"cols", cols},   {"nonzeros", nonzeros},
          {"fill", fill},         {"pivots", pivots}, {"free_vars", free_vars},
          {"peak_entries", peak_entries}, {"non_unit_pivots", non_unit_pivots}, {"seconds", seconds}};
}

ModSystem lift_system(const DegenerationTable& t, int threads) {
  if (t.modulus == 0) throw Error(ErrorKind::InvalidArgument, "lift works modulo a power of p");
  Tree T(t.p);
  auto V = T.vertices(t.m - 1);
  size_t N = T.even_edges_upto(t.m);
  ModSystem s;
  s.p = t.p;
  s.modulus = t.modulus;
  s.cols = N * N;
  size_t R = V.size() * N;
  s.rows.resize(2 * R);
  s.rhs.resize(2 * R);
  int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (size_t r = 0; r < V.size(); ++r) {
    auto st = star_of(T, V[r]);
    for (size_t j = 0; j < N; ++j) {
      auto& row1 = s.rows[r * N + j];
      for (const Signed& x : st) row1.push_back({static_cast<uint32_t>(x.index * N + j), mod_norm(x.sign, t.modulus)});
      std::sort(row1.begin(), row1.end());
      s.rhs[r * N + j] = t.d1.at(r, j);
      auto& row2 = s.rows[R + r * N + j];
      for (const Signed& x : st) row2.push_back({static_cast<uint32_t>(j * N + x.index), mod_norm(x.sign, t.modulus)});
      std::sort(row2.begin(), row2.end());
      s.rhs[R + r * N + j] = t.d2.at(r, j);
    }
  }
  return s;
}

bool satisfies(const ModSystem& s, const std::vector<i64>& x) {
  if (x.size() != s.cols) return false;
  for (size_t r = 0; r < s.rows.size(); ++r) {
    u64 acc = 0;
    for (const auto& [c, a] : s.rows[r])
      acc = (acc + mul(static_cast<u64>(mod_norm(a, s.modulus)), static_cast<u64>(mod_norm(x[c], s.modulus)), s.modulus)) %
            s.modulus;
    if (acc != static_cast<u64>(mod_norm(s.rhs[r], s.modulus))) return false;
  }
  return true;
}

std::vector<i64> solve_sparse(const ModSystem& s, SolveStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  const u64 mod = s.modulus, p = s.p;
  digits_of(mod, p);
  using Entry = std::pair<uint32_t, u64>;
  size_t nr = s.rows.size();
  std::vector<std::vector<Entry>> rows(nr);
  std::vector<u64> rhs(nr);
  std::vector<std::vector<uint32_t>> colrows(s.cols);
  size_t entries = 0;
  for (size_t r = 0; r < nr; ++r) {
    for (const auto& [c, a] : s.rows[r]) {
      u64 v = static_cast<u64>(mod_norm(a, mod));
      if (v) rows[r].push_back({c, v});
    }
    std::sort(rows[r].begin(), rows[r].end());
    for (const auto& [c, a] : rows[r]) colrows[c].push_back(static_cast<uint32_t>(r));
    entries += rows[r].size();
    rhs[r] = static_cast<u64>(mod_norm(s.rhs[r], mod));
  }
  SolveStats st;
  st.rows = nr;
  st.cols = s.cols;
  st.nonzeros = entries;
  st.peak_entries = entries;
  // Column membership is kept as unsorted lists with lazy removal.
  std::vector<uint32_t> colcount(s.cols, 0);
  for (size_t c = 0; c < s.cols; ++c) colcount[c] = static_cast<uint32_t>(colrows[c].size());
  std::vector<char> active(nr, 1);
  std::set<std::pair<size_t, uint32_t>> queue;
  for (size_t r = 0; r < nr; ++r) queue.insert({rows[r].size(), static_cast<uint32_t>(r)});

  struct Pivot {
    uint32_t row, col;
  };
  std::vector<Pivot> pivots;
  auto has_col = [&](uint32_t r, uint32_t c) {
    auto it = std::lower_bound(rows[r].begin(), rows[r].end(), Entry{c, 0});
    return it != rows[r].end() && it->first == c;
  };

  while (!queue.empty()) {
    auto [n, r] = *queue.begin();
    if (n == 0) {
      if (rhs[r] != 0) throw Error(ErrorKind::LiftInconsistent, "linear system is inconsistent");
      queue.erase(queue.begin());
      active[r] = 0;
      continue;
    }
    // Pivot row: fewest entries among rows with a unit entry; column: unit entry with fewest rows.
    uint32_t prow = UINT32_MAX, pcol = UINT32_MAX;
    for (const auto& [len, cand] : queue) {
      uint32_t best = UINT32_MAX;
      for (const auto& [c, a] : rows[cand])
        if (a % p != 0 && (best == UINT32_MAX || colcount[c] < colcount[best])) best = c;
      if (best != UINT32_MAX) {
        prow = cand;
        pcol = best;
        break;
      }
    }
    if (prow == UINT32_MAX) {
      // No unit entry left: take an entry of least valuation.
      int vbest = PadicNumber::kInf;
      for (const auto& [len, cand] : queue)
        for (const auto& [c, a] : rows[cand]) {
          int v = val(a, p, mod);
          if (v < vbest || (v == vbest && c < pcol)) {
            vbest = v;
            prow = cand;
            pcol = c;
          }
        }
      ++st.non_unit_pivots;
    }
    queue.erase({rows[prow].size(), prow});
    active[prow] = 0;
    for (const auto& [c, a] : rows[prow]) --colcount[c];
    u64 a = std::lower_bound(rows[prow].begin(), rows[prow].end(), Entry{pcol, 0})->second;
    int k = val(a, p, mod);
    u64 pk = ppow(p, k);
    u64 ainv = invmod(a / pk % (mod / pk), mod / pk);
    std::vector<uint32_t> targets;
    for (uint32_t r2 : colrows[pcol])
      if (active[r2] && r2 != prow && has_col(r2, pcol)) targets.push_back(r2);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (uint32_t r2 : targets) {
      u64 b = std::lower_bound(rows[r2].begin(), rows[r2].end(), Entry{pcol, 0})->second;
      // factor with factor * a = b mod p^M (v(b) >= k)
      u64 f = mul((b / pk) % mod, ainv, mod);
      queue.erase({rows[r2].size(), r2});
      std::vector<Entry> out;
      out.reserve(rows[r2].size() + rows[prow].size());
      auto i = rows[r2].begin(), j = rows[prow].begin();
      while (i != rows[r2].end() || j != rows[prow].end()) {
        if (j == rows[prow].end() || (i != rows[r2].end() && i->first < j->first)) {
          out.push_back(*i++);
        } else if (i == rows[r2].end() || j->first < i->first) {
          u64 v = (mod - mul(f, j->second, mod)) % mod;
          if (v) {
            out.push_back({j->first, v});
            colrows[j->first].push_back(r2);
            ++colcount[j->first];
            ++st.fill;
          }
          ++j;
        } else {
          u64 v = (i->second + mod - mul(f, j->second, mod)) % mod;
          if (v) {
            out.push_back({i->first, v});
          } else {
            --colcount[i->first];
          }
          ++i;
          ++j;
        }
      }
      entries += out.size();
      entries -= rows[r2].size();
      rows[r2] = std::move(out);
      rhs[r2] = (rhs[r2] + mod - mul(f, rhs[prow], mod)) % mod;
      queue.insert({rows[r2].size(), r2});
    }
    st.peak_entries = std::max(st.peak_entries, entries);
    pivots.push_back({prow, pcol});
  }

  std::vector<i64> x(s.cols, 0);
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    u64 acc = rhs[it->row], a = 0;
    for (const auto& [c, v] : rows[it->row]) {
      if (c == it->col) {
        a = v;
        continue;
      }
      acc = (acc + mod - mul(v, static_cast<u64>(x[c]), mod)) % mod;
    }
    u64 xv;
    if (!solve_scalar(a, acc, p, mod, &xv)) throw Error(ErrorKind::LiftInconsistent, "linear system is inconsistent");
    x[it->col] = static_cast<i64>(xv);
  }
  st.pivots = pivots.size();
  st.free_vars = s.cols - pivots.size();
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return x;
}

std::vector<i64> solve_dense(const ModSystem& s) {
  const u64 mod = s.modulus, p = s.p;
  digits_of(mod, p);
  size_t nr = s.rows.size(), nc = s.cols;
  std::vector<std::vector<u64>> A(nr, std::vector<u64>(nc + 1, 0));
  for (size_t r = 0; r < nr; ++r) {
    for (const auto& [c, a] : s.rows[r]) A[r][c] = (A[r][c] + static_cast<u64>(mod_norm(a, mod))) % mod;
    A[r][nc] = static_cast<u64>(mod_norm(s.rhs[r], mod));
  }
  std::vector<size_t> colperm(nc);
  for (size_t c = 0; c < nc; ++c) colperm[c] = c;
  size_t rank = 0;
  for (; rank < std::min(nr, nc); ++rank) {
    // Full pivoting on valuation.
    int vbest = PadicNumber::kInf;
    size_t br = 0, bc = 0;
    for (size_t r = rank; r < nr; ++r)
      for (size_t c = rank; c < nc; ++c) {
        int v = val(A[r][colperm[c]], p, mod);
        if (v < vbest) {
          vbest = v;
          br = r;
          bc = c;
        }
      }
    if (vbest >= PadicNumber::kInf) break;
    std::swap(A[rank], A[br]);
    std::swap(colperm[rank], colperm[bc]);
    size_t pc = colperm[rank];
    u64 a = A[rank][pc];
    u64 pk = ppow(p, vbest);
    u64 ainv = invmod(a / pk % (mod / pk), mod / pk);
    for (size_t r = rank + 1; r < nr; ++r) {
      if (A[r][pc] == 0) continue;
      u64 f = mul(A[r][pc] / pk % mod, ainv, mod);
      for (size_t c = 0; c <= nc; ++c) A[r][c] = (A[r][c] + mod - mul(f, A[rank][c], mod)) % mod;
    }
  }
  for (size_t r = rank; r < nr; ++r)
    if (A[r][nc] != 0) throw Error(ErrorKind::LiftInconsistent, "linear system is inconsistent");
  std::vector<i64> x(nc, 0);
  for (size_t i = rank; i-- > 0;) {
    size_t pc = colperm[i];
    u64 acc = A[i][nc];
    for (size_t c = 0; c < nc; ++c)
      if (c != pc && A[i][c]) acc = (acc + mod - mul(A[i][c], static_cast<u64>(x[c]), mod)) % mod;
    u64 xv;
    if (!solve_scalar(A[i][pc], acc, p, mod, &xv)) throw Error(ErrorKind::LiftInconsistent, "linear system is inconsistent");
    x[pc] = static_cast<i64>(xv);
  }
  return x;
}

FiniteCochain lift(const DegenerationTable& t, SolveStats* stats, int threads) {
  ModSystem s = lift_system(t, threads);
  std::vector<i64> x = solve_sparse(s, stats);
  FiniteCochain D(t.p, t.m, t.modulus);
  D.data().assign(x.begin(), x.end());
  return D;
}

FiniteCochain canonical_d0(const FiniteCochain& D0) { return lift(gauge_normalized(degenerations_of(D0))); }

// ------------------------------------------------------------- Harmonizer

Harmonizer::Harmonizer(const Cocycle& c, int m, u64 modulus, int threads)
    : c_(c), m_(m), modulus_(modulus), threads_(threads) {
  table_ = degenerations(c, m, modulus, threads);
  D_ = lift(table_, &stats_, threads);
}

FiniteCochain Harmonizer::raw(const GroupElement& g) const {
  Tree T(c_.p());
  int mo = m_ - reach(T, g.s);
  if (mo < 1) throw Error(ErrorKind::DepthExceeded, "group element reaches beyond the harmonization depth");
  return evaluate(c_, g, mo, modulus_, threads_);
}

FiniteCochain Harmonizer::corrected(const GroupElement& g) const {
  FiniteCochain out = raw(g) - coboundary(D_, g.s);
  if (!is_harmonic(out)) throw Error(ErrorKind::LiftInconsistent, "corrected cochain is not harmonic");
  return out;
}

}  // namespace plectic
