// Independent reference router for engine validation: explicit unit-step
// Dijkstra on a small boxed grid, exhaustive enumeration of all tied
// minimum-cost simple paths, and the same secondary-weight tie-break.
// Shares only the weight-field definition with the engine, not the search.
#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "sirsn/engine.hpp"

namespace sirsn_test {

using namespace sirsn;
using lattice::u128;

struct OracleOut {
  bool ok = false;
  BigRational cost;
  uint64_t n_paths = 0;
  std::vector<std::pair<int64_t, int64_t>> best_turns;  // collinear-compressed
  double weight = 0.0;
  bool exploded = false;
};

class RouteOracle {
 public:
  RouteOracle(const ModelParams& mp, int32_t level, lattice::Box box)
      : mp_(mp), level_(level), box_(box), field_(mp.master_seed, mp.h_min) {
    w_ = box.x_hi - box.x_lo + 1;
    h_ = box.y_hi - box.y_lo + 1;
    int64_t amax = 1;
    for (int64_t v : {box.x_lo, box.x_hi, box.y_lo, box.y_hi})
      amax = std::max(amax, std::abs(v));
    h_bot_ = level_;
    h_top_ = level_ + static_cast<int32_t>(std::bit_width(static_cast<uint64_t>(amax)));
  }

  OracleOut route(int64_t sx, int64_t sy, int64_t tx, int64_t ty, size_t path_cap = 500000) {
    const size_t n = static_cast<size_t>(w_) * static_cast<size_t>(h_);
    std::vector<u128> dist(n, ~u128{0});
    const size_t s = id(sx, sy), t = id(tx, ty);
    using QE = std::pair<u128, size_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      auto [ux, uy] = pos(u);
      for (int dir = 0; dir < 4; ++dir) {
        int64_t vx = ux + (dir == 0) - (dir == 1);
        int64_t vy = uy + (dir == 2) - (dir == 3);
        if (!box_.contains(vx, vy)) continue;
        u128 nd = d + step_cost(ux, uy, dir);
        size_t v = id(vx, vy);
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.push({nd, v});
        }
      }
    }
    OracleOut out;
    if (dist[t] == ~u128{0}) return out;
    out.ok = true;
    out.cost = to_value(dist[t]);
    // enumerate all tight simple paths s -> t
    std::vector<char> on_path(n, 0);
    std::vector<size_t> cur{s};
    on_path[s] = 1;
    std::vector<std::vector<size_t>> paths;
    dfs(s, t, dist, on_path, cur, paths, path_cap, out.exploded);
    out.n_paths = paths.size();
    if (paths.empty()) return out;
    double best_w = 0;
    std::vector<std::pair<int8_t, int64_t>> best_moves;
    bool have = false;
    for (const auto& p : paths) {
      double w = path_weight(p);
      auto moves = path_moves(p);
      if (!have || w < best_w || (w == best_w && moves < best_moves)) {
        best_w = w;
        best_moves = moves;
        have = true;
        out.best_turns = compress(p);
        out.weight = w;
      }
    }
    return out;
  }

  BigRational to_value(u128 scaled) const {
    BigInt s = BigInt(static_cast<uint64_t>(scaled >> 64));
    s <<= 64;
    s += BigInt(static_cast<uint64_t>(scaled));
    BigRational r(s, 1);
    r = r * rational_pow(mp_.gamma.rat(), h_bot_);
    r = r / BigRational(rational_pow(BigRational(mp_.gamma.q), h_top_ - h_bot_));
    r = r * rational_pow(BigRational(2), level_);
    return r;
  }

 private:
  size_t id(int64_t x, int64_t y) const {
    return static_cast<size_t>(x - box_.x_lo) * static_cast<size_t>(h_) +
           static_cast<size_t>(y - box_.y_lo);
  }
  std::pair<int64_t, int64_t> pos(size_t u) const {
    return {box_.x_lo + static_cast<int64_t>(u / static_cast<size_t>(h_)),
            box_.y_lo + static_cast<int64_t>(u % static_cast<size_t>(h_))};
  }

  u128 step_cost(int64_t x, int64_t y, int dir) const {
    int64_t line = (dir < 2) ? y : x;  // horizontal moves ride a y-line
    int32_t h = lattice::index_height(line, level_);
    if (h == kInfiniteHeight) return 0;
    u128 c = 1;
    for (int i = 0; i < h - h_bot_; ++i) c *= static_cast<u128>(mp_.gamma.p);
    for (int i = 0; i < h_top_ - h; ++i) c *= static_cast<u128>(mp_.gamma.q);
    return c;
  }

  void dfs(size_t u, size_t t, const std::vector<u128>& dist, std::vector<char>& on_path,
           std::vector<size_t>& cur, std::vector<std::vector<size_t>>& paths, size_t cap,
           bool& exploded) {
    if (exploded) return;
    if (u == t) {
      paths.push_back(cur);
      if (paths.size() >= cap) exploded = true;
      return;
    }
    auto [ux, uy] = pos(u);
    for (int dir = 0; dir < 4; ++dir) {
      int64_t vx = ux + (dir == 0) - (dir == 1);
      int64_t vy = uy + (dir == 2) - (dir == 3);
      if (!box_.contains(vx, vy)) continue;
      size_t v = id(vx, vy);
      if (on_path[v]) continue;
      if (dist[u] + step_cost(ux, uy, dir) != dist[v]) continue;
      if (dist[v] > dist[t]) continue;  // tight steps never decrease dist
      on_path[v] = 1;
      cur.push_back(v);
      dfs(v, t, dist, on_path, cur, paths, cap, exploded);
      cur.pop_back();
      on_path[v] = 0;
    }
  }

  double path_weight(const std::vector<size_t>& p) const {
    double w = 0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
      auto [ax, ay] = pos(p[i]);
      auto [bx, by] = pos(p[i + 1]);
      if (ay == by)
        w += field_.segment_weight(0, DyadicScalar::at_index(ay, level_), std::min(ax, bx),
                                   std::max(ax, bx), level_);
      else
        w += field_.segment_weight(1, DyadicScalar::at_index(ax, level_), std::min(ay, by),
                                   std::max(ay, by), level_);
    }
    return w;
  }

  std::vector<std::pair<int8_t, int64_t>> path_moves(const std::vector<size_t>& p) const {
    // maximal straight runs split at dominating interior summits, mirroring
    // the engine's canonical decomposition, so lex comparisons align
    std::vector<std::pair<int8_t, int64_t>> moves;
    size_t i = 0;
    while (i + 1 < p.size()) {
      auto [ax, ay] = pos(p[i]);
      size_t j = i + 1;
      auto [bx, by] = pos(p[j]);
      int8_t dir = (by == ay) ? ((bx > ax) ? 0 : 1) : ((by > ay) ? 2 : 3);
      while (j + 1 < p.size()) {
        auto [cx, cy] = pos(p[j + 1]);
        auto [jx, jy] = pos(p[j]);
        bool straight = (dir < 2) ? (cy == jy && ((dir == 0) ? cx > jx : cx < jx))
                                  : (cx == jx && ((dir == 2) ? cy > jy : cy < jy));
        if (!straight) break;
        ++j;
      }
      // split the run [i..j] at its dominating summit if one exists
      auto [ex, ey] = pos(p[j]);
      int64_t a = (dir < 2) ? ax : ay;
      int64_t b = (dir < 2) ? ex : ey;
      int64_t lo = std::min(a, b), hi = std::max(a, b);
      int64_t split = 0;
      bool do_split = false;
      if (hi - lo >= 2) {
        int64_t pk = peak_int(lo + 1, hi - 1);
        auto hh = [&](int64_t v) {
          return v == 0 ? int64_t{kInfiniteHeight}
                        : int64_t{lattice::index_height(v, level_)};
        };
        if (hh(pk) >= std::max(hh(a), hh(b))) {
          split = pk;
          do_split = true;
        }
      }
      if (do_split) {
        moves.push_back({dir, std::abs(split - a)});
        moves.push_back({dir, std::abs(b - split)});
      } else {
        moves.push_back({dir, hi - lo});
      }
      i = j;
    }
    return moves;
  }

  std::vector<std::pair<int64_t, int64_t>> compress(const std::vector<size_t>& p) const {
    std::vector<std::pair<int64_t, int64_t>> out;
    for (size_t i = 0; i < p.size(); ++i) {
      auto [x, y] = pos(p[i]);
      if (i > 0 && i + 1 < p.size()) {
        auto [px, py] = pos(p[i - 1]);
        auto [nx, ny] = pos(p[i + 1]);
        if ((px == x && x == nx) || (py == y && y == ny)) continue;
      }
      out.push_back({x, y});
    }
    return out;
  }

  ModelParams mp_;
  int32_t level_;
  lattice::Box box_;
  WeightField field_;
  int64_t w_, h_;
  int32_t h_bot_, h_top_;
};

}  // namespace sirsn_test
