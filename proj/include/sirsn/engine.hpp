// Exact minimum-cost routing on the implicit dyadic lattice.
//
// Queries run in two passes.  Pass 1 is Dijkstra over turn states
// (point, incoming direction, continuation flag) with exact integer cost
// keys; moves are generated lazily, so a state's possibly long successor
// list is only walked while it stays under the current cost bound.  Pass 2
// walks the tight-edge graph in distance order (topologically inside
// zero-cost plateaus) and resolves cost ties by total secondary weight,
// then lexicographically.
//
// Move generation encodes the turn structure of minimum-cost paths: a path
// may stop at j when no skipped point is at least as high as both the start
// and the stop, and may pass straight through a point only when that point
// strictly dominates its segment.  Every minimum-cost lattice path
// decomposes uniquely into such moves, so costs, tie sets and tie counts
// are exact.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sirsn/dyadic.hpp"
#include "sirsn/params.hpp"
#include "sirsn/route.hpp"
#include "sirsn/weights.hpp"

namespace sirsn {

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceLimitError : EngineError {
  using EngineError::EngineError;
};

namespace lattice {

using u128 = unsigned __int128;

constexpr int64_t kMaxIndex = (int64_t{1} << 28) - 2;

inline int32_t index_height(int64_t index, int32_t level) {
  if (index == 0) return kInfiniteHeight;
  return level + std::countr_zero(static_cast<uint64_t>(std::abs(index)));
}

inline int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

struct Box {
  int64_t x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  bool contains(int64_t x, int64_t y) const {
    return x_lo <= x && x <= x_hi && y_lo <= y && y <= y_hi;
  }
  bool on_boundary(int64_t x, int64_t y) const {
    return x == x_lo || x == x_hi || y == y_lo || y == y_hi;
  }
};

// dir: 0:+x 1:-x 2:+y 3:-y.  flag: 0 = source, 1+dir = arrived via dir,
// 5+dir = arrived via dir and may continue straight through.
constexpr int kFlagSource = 0;
inline int dir_axis(int dir) { return dir >> 1; }
inline int dir_sign(int dir) { return (dir & 1) ? -1 : +1; }

inline uint64_t pack_state(int64_t ix, int64_t iy, int flag) {
  uint64_t ux = static_cast<uint64_t>(ix + (int64_t{1} << 28));
  uint64_t uy = static_cast<uint64_t>(iy + (int64_t{1} << 28));
  return (ux << 34) | (uy << 5) | static_cast<uint64_t>(flag);
}
inline void unpack_state(uint64_t key, int64_t& ix, int64_t& iy, int& flag) {
  flag = static_cast<int>(key & 31);
  iy = static_cast<int64_t>((key >> 5) & ((uint64_t{1} << 29) - 1)) - (int64_t{1} << 28);
  ix = static_cast<int64_t>(key >> 34) - (int64_t{1} << 28);
}

// A move along `axis` (0 horizontal, 1 vertical) on the line with fixed
// index line_idx, from `from` to `to` in traversal order.  Return false to
// forbid the move.
using MoveFilter = std::function<bool(uint8_t axis, int64_t line_idx, int64_t from, int64_t to)>;

struct StateInfo {
  u128 dist = 0;
  double wgt = 0.0;
  uint64_t cnt = 0;
  uint64_t parent = 0;
  int64_t move_steps = 0;
  int8_t move_dir = -1;  // -1: no parent (source / not yet relaxed)
};

constexpr uint64_t kTieCap = uint64_t{1} << 62;

struct QueryRequest {
  int64_t sx = 0, sy = 0;
  int64_t tx = 0, ty = 0;
  bool has_target = true;
  int32_t level = 0;
  Box box{};
  const MoveFilter* filter = nullptr;
  bool has_cap = false;
  u128 cost_cap = 0;
};

struct QueryResult {
  bool reached = false;
  u128 dist = 0;
  std::vector<std::pair<int64_t, int64_t>> turn_points;  // indices, source first
  std::map<int32_t, int64_t> ledger_steps;               // line height -> step count
  double weight = 0.0;
  uint64_t tie_count = 0;
  uint32_t weight_tie_events = 0;
  uint64_t settled = 0;
  bool touched_boundary = false;
  int32_t level = 0;
  int32_t h_bot = 0, h_top = 0;
  std::unordered_map<uint64_t, StateInfo> states;

  // Exact value of a scaled cost (scaled counts lattice steps weighted by
  // p^{h-h_bot} q^{h_top-h}; a step has length 2^level).
  BigRational scaled_to_value(u128 scaled, const Gamma& gamma) const {
    BigInt s = BigInt(static_cast<uint64_t>(scaled >> 64));
    s <<= 64;
    s += BigInt(static_cast<uint64_t>(scaled));
    BigRational r(s, 1);
    r = r * rational_pow(gamma.rat(), h_bot);
    r = r / BigRational(rational_pow(BigRational(gamma.q), h_top - h_bot));
    r = r * rational_pow(BigRational(2), level);
    return r;
  }
};

class Query {
 public:
  Query(const QueryRequest& req, const Gamma& gamma, const WeightField& field)
      : req_(req), gamma_(gamma), field_(field), level_(req.level) {
    for (int64_t v : {req.box.x_lo, req.box.x_hi, req.box.y_lo, req.box.y_hi})
      if (std::abs(v) > kMaxIndex) throw ResourceLimitError("search box exceeds index range");
    if (!req.box.contains(req.sx, req.sy) ||
        (req.has_target && !req.box.contains(req.tx, req.ty)))
      throw EngineError("endpoints outside search box");
    int64_t amax = 1;
    for (int64_t v : {req.box.x_lo, req.box.x_hi, req.box.y_lo, req.box.y_hi})
      amax = std::max(amax, std::abs(v));
    h_bot_ = level_;
    h_top_ = level_ + static_cast<int32_t>(std::bit_width(static_cast<uint64_t>(amax)));
    int span = h_top_ - h_bot_;
    if (span * std::log2(static_cast<double>(gamma.q)) + 34.0 > 120.0)
      throw ResourceLimitError("cost scale exceeds the 128-bit budget");
    step_cost_.assign(span + 1, 1);
    for (int h = 0; h <= span; ++h) {
      u128 c = 1;
      for (int i = 0; i < h; ++i) c *= static_cast<u128>(gamma.p);
      for (int i = 0; i < span - h; ++i) c *= static_cast<u128>(gamma.q);
      step_cost_[h] = c;
    }
  }

  QueryResult run() {
    pass1();
    pass2();
    return assemble();
  }

 private:
  struct Gen {
    uint64_t origin = 0;
    u128 base = 0;
    int8_t dir = 0;
    bool continuation = false;
    int64_t c0 = 0;
    int32_t h_c0 = 0;
    int64_t cur = 0;
    int64_t m_height = std::numeric_limits<int64_t>::min();
    int64_t line_idx = 0;
    u128 per_step = 0;
    int64_t limit_lo = 0, limit_hi = 0;
    bool done = false;
  };

  struct Emission {
    int64_t j;
    u128 cost;  // base + move cost
    bool can_continue;
  };

  struct HeapEntry {
    u128 cost;
    uint64_t key;  // emitted/settling state
    uint32_t gen;  // generator index (kind 1)
    uint8_t kind;  // 0: state, 1: generator emission
    bool operator>(const HeapEntry& o) const {
      if (cost != o.cost) return cost > o.cost;
      if (kind != o.kind) return kind > o.kind;
      return key > o.key;
    }
  };

  u128 per_step_cost(int32_t line_height) const {
    if (line_height == kInfiniteHeight) return 0;
    return step_cost_[line_height - h_bot_];
  }

  Gen make_gen(uint64_t origin_key, u128 base, int dir, bool continuation) const {
    int64_t ix, iy;
    int flag;
    unpack_state(origin_key, ix, iy, flag);
    Gen g;
    g.origin = origin_key;
    g.base = base;
    g.dir = static_cast<int8_t>(dir);
    g.continuation = continuation;
    if (dir_axis(dir) == 0) {
      g.c0 = ix;
      g.line_idx = iy;
      g.limit_lo = req_.box.x_lo;
      g.limit_hi = req_.box.x_hi;
    } else {
      g.c0 = iy;
      g.line_idx = ix;
      g.limit_lo = req_.box.y_lo;
      g.limit_hi = req_.box.y_hi;
    }
    g.h_c0 = index_height(g.c0, level_);
    g.per_step = per_step_cost(index_height(g.line_idx, level_));
    g.cur = g.c0 + dir_sign(dir);
    return g;
  }

  std::optional<Emission> advance(Gen& g) const {
    if (g.done) return std::nullopt;
    const int sign = dir_sign(g.dir);
    const uint8_t axis = static_cast<uint8_t>(dir_axis(g.dir));
    while (g.cur >= g.limit_lo && g.cur <= g.limit_hi) {
      const int64_t j = g.cur;
      const int32_t hj = index_height(j, level_);
      bool emit, can_continue = false;
      if (g.continuation) {
        if (hj >= g.h_c0) {
          g.done = true;
          return std::nullopt;
        }
        emit = true;
        g.cur = j + sign;
      } else {
        emit = g.m_height < static_cast<int64_t>(std::max(g.h_c0, hj));
        can_continue = hj > g.h_c0;
        const int64_t m_next = std::max(g.m_height, static_cast<int64_t>(hj));
        if (m_next < g.h_c0) {
          g.cur = j + sign;
        } else if (m_next >= kInfiniteHeight) {
          g.done = true;  // nothing is reachable past an axis crossing
        } else {
          const int e = static_cast<int>(m_next - level_) + 1;
          if (e >= 62) {
            g.done = true;
          } else {
            const int64_t step = int64_t{1} << e;
            g.cur = (sign > 0) ? (floor_div(j, step) + 1) * step
                               : (floor_div(j - 1, step)) * step;
            if (sign < 0 && g.cur >= j) g.cur -= step;
          }
        }
        g.m_height = m_next;
      }
      bool allowed = !req_.filter || (*req_.filter)(axis, g.line_idx, g.c0, j);
      if (emit && allowed)
        return Emission{j, g.base + g.per_step * static_cast<u128>(std::abs(j - g.c0)),
                        can_continue};
      if (g.done) return std::nullopt;
    }
    g.done = true;
    return std::nullopt;
  }

  uint64_t emission_state(const Gen& g, const Emission& e) const {
    int64_t ix, iy;
    int flag;
    unpack_state(g.origin, ix, iy, flag);
    int64_t nx = ix, ny = iy;
    if (dir_axis(g.dir) == 0)
      nx = e.j;
    else
      ny = e.j;
    const int nflag = 1 + g.dir + ((!g.continuation && e.can_continue) ? 4 : 0);
    return pack_state(nx, ny, nflag);
  }

  template <typename FnGen>
  void for_each_move_kind(int flag, FnGen&& fn) const {
    if (flag == kFlagSource) {
      for (int d = 0; d < 4; ++d) fn(d, false);
      return;
    }
    const int dir = (flag - 1) & 3;
    if (dir_axis(dir) == 0) {
      fn(2, false);
      fn(3, false);
    } else {
      fn(0, false);
      fn(1, false);
    }
    if (flag >= 5) fn(dir, true);
  }

  void pass1() {
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
    std::vector<Gen> gens;
    const uint64_t src = pack_state(req_.sx, req_.sy, kFlagSource);
    states_[src].dist = 0;
    settled_.insert(src);
    auto spawn = [&](uint64_t key, u128 dist) {
      int64_t ix, iy;
      int flag;
      unpack_state(key, ix, iy, flag);
      for_each_move_kind(flag, [&](int dir, bool continuation) {
        Gen g = make_gen(key, dist, dir, continuation);
        auto e = advance(g);
        if (e) {
          gens.push_back(g);
          heap.push({e->cost, emission_state(gens.back(), *e),
                     static_cast<uint32_t>(gens.size() - 1), 1});
        }
      });
    };
    spawn(src, 0);
    bool have_target = false;
    u128 target_best = 0;
    while (!heap.empty()) {
      HeapEntry top = heap.top();
      if (have_target && top.cost > target_best) break;
      if (req_.has_cap && top.cost > req_.cost_cap) break;
      heap.pop();
      if (top.kind == 1) {
        Gen& g = gens[top.gen];
        auto next = advance(g);
        if (next) heap.push({next->cost, emission_state(g, *next), top.gen, 1});
        const uint64_t key = top.key;
        if (!settled_.count(key)) {
          auto it = states_.find(key);
          if (it == states_.end() || top.cost < it->second.dist) states_[key].dist = top.cost;
          heap.push({top.cost, key, 0, 0});
        }
        continue;
      }
      const uint64_t key = top.key;
      if (settled_.count(key)) continue;
      {
        auto it = states_.find(key);
        if (it == states_.end() || top.cost > it->second.dist) continue;
      }
      settled_.insert(key);
      if (req_.has_target && !have_target) {
        int64_t ix, iy;
        int flag;
        unpack_state(key, ix, iy, flag);
        if (ix == req_.tx && iy == req_.ty) {
          have_target = true;
          target_best = top.cost;
        }
      }
      spawn(key, top.cost);
    }
    reached_ = have_target;
    bound_ = have_target ? target_best : (req_.has_cap ? req_.cost_cap : 0);
  }

  // All moves from `key` with move cost <= budget: fn(to, cost, steps, dir).
  template <typename Fn>
  void enumerate_moves(uint64_t key, u128 budget, bool zero_cost_only, Fn&& fn) const {
    int64_t ix, iy;
    int flag;
    unpack_state(key, ix, iy, flag);
    for_each_move_kind(flag, [&](int dir, bool continuation) {
      Gen g = make_gen(key, 0, dir, continuation);
      if (zero_cost_only && g.per_step != 0) return;
      const int64_t c0 = g.c0;
      while (true) {
        auto e = advance(g);
        if (!e || e->cost > budget) break;
        fn(emission_state(g, *e), e->cost, std::abs(e->j - c0), dir);
      }
    });
  }

  double move_weight(uint64_t from_key, int dir, int64_t steps) const {
    int64_t ix, iy;
    int flag;
    unpack_state(from_key, ix, iy, flag);
    const int sign = dir_sign(dir);
    if (dir_axis(dir) == 0) {
      const int64_t a = std::min(ix, ix + sign * steps), b = std::max(ix, ix + sign * steps);
      return field_.segment_weight(0, DyadicScalar::at_index(iy, level_), a, b, level_);
    }
    const int64_t a = std::min(iy, iy + sign * steps), b = std::max(iy, iy + sign * steps);
    return field_.segment_weight(1, DyadicScalar::at_index(ix, level_), a, b, level_);
  }

  std::vector<std::pair<int8_t, int64_t>> chain_of(uint64_t key) const {
    std::vector<std::pair<int8_t, int64_t>> moves;
    uint64_t cur = key;
    while (true) {
      auto it = states_.find(cur);
      if (it == states_.end() || it->second.move_dir < 0) break;
      moves.push_back({it->second.move_dir, it->second.move_steps});
      cur = it->second.parent;
    }
    std::reverse(moves.begin(), moves.end());
    return moves;
  }

  void relax(uint64_t from, uint64_t to, int64_t steps, int dir) {
    StateInfo& f = states_[from];
    StateInfo& t = states_[to];
    const double w = f.wgt + move_weight(from, dir, steps);
    const bool first = (t.cnt == 0);
    t.cnt = (t.cnt > kTieCap - f.cnt) ? kTieCap : t.cnt + f.cnt;
    if (first || w < t.wgt) {
      t.wgt = w;
      t.parent = from;
      t.move_steps = steps;
      t.move_dir = static_cast<int8_t>(dir);
      return;
    }
    if (w == t.wgt) {
      ++weight_ties_;
      auto ca = chain_of(from);
      ca.push_back({static_cast<int8_t>(dir), steps});
      auto cb = chain_of(to);
      if (ca < cb) {
        t.parent = from;
        t.move_steps = steps;
        t.move_dir = static_cast<int8_t>(dir);
      }
    }
  }

  void pass2() {
    if (!reached_ && !req_.has_cap) return;
    std::vector<std::pair<u128, uint64_t>> order;
    order.reserve(settled_.size());
    for (uint64_t key : settled_)
      if (states_[key].dist <= bound_) order.push_back({states_[key].dist, key});
    std::sort(order.begin(), order.end());
    const uint64_t src = pack_state(req_.sx, req_.sy, kFlagSource);
    states_[src].cnt = 1;

    struct EdgeRec {
      uint64_t from, to;
      int64_t steps;
      int dir;
    };
    size_t i = 0;
    while (i < order.size()) {
      size_t j = i;
      while (j < order.size() && order[j].first == order[i].first) ++j;
      // Zero-cost tight edges stay inside the equal-distance group and are
      // acyclic (the axes form a tree and straight reversal is forbidden),
      // so process the group topologically.
      std::vector<EdgeRec> zedges;
      std::unordered_map<uint64_t, int> indeg;
      for (size_t k = i; k < j; ++k) indeg.emplace(order[k].second, 0);
      for (size_t k = i; k < j; ++k) {
        const uint64_t key = order[k].second;
        enumerate_moves(key, 0, true, [&](uint64_t to, u128, int64_t steps, int dir) {
          auto it = indeg.find(to);
          if (it == indeg.end()) return;  // not settled within bound
          zedges.push_back({key, to, steps, dir});
          ++it->second;
        });
      }
      std::vector<uint64_t> topo;
      topo.reserve(indeg.size());
      for (size_t k = i; k < j; ++k)
        if (indeg[order[k].second] == 0) topo.push_back(order[k].second);
      std::unordered_map<uint64_t, std::vector<size_t>> out;
      for (size_t e = 0; e < zedges.size(); ++e) out[zedges[e].from].push_back(e);
      for (size_t head = 0; head < topo.size(); ++head) {
        const uint64_t u = topo[head];
        for (size_t e : out[u]) {
          if (states_[u].cnt != 0) relax(u, zedges[e].to, zedges[e].steps, zedges[e].dir);
          if (--indeg[zedges[e].to] == 0) topo.push_back(zedges[e].to);
        }
      }
      if (topo.size() != indeg.size()) throw EngineError("zero-cost tight subgraph has a cycle");
      // Positive-cost tight edges into later groups.
      for (size_t k = i; k < j; ++k) {
        const uint64_t key = order[k].second;
        if (states_[key].cnt == 0) continue;
        const u128 budget = bound_ - states_[key].dist;
        const u128 dist_from = states_[key].dist;
        enumerate_moves(key, budget, false, [&](uint64_t to, u128 mc, int64_t steps, int dir) {
          if (mc == 0) return;
          auto it = states_.find(to);
          if (it == states_.end() || !settled_.count(to)) return;
          if (dist_from + mc != it->second.dist) return;
          relax(key, to, steps, dir);
        });
      }
      i = j;
    }
  }

  QueryResult assemble() {
    QueryResult res;
    res.level = level_;
    res.h_bot = h_bot_;
    res.h_top = h_top_;
    res.settled = settled_.size();
    res.weight_tie_events = weight_ties_;
    if (!req_.has_target || !reached_) {
      res.reached = false;
      res.states = std::move(states_);
      return res;
    }
    res.reached = true;
    res.dist = bound_;
    uint64_t best_key = 0;
    bool have = false;
    uint64_t ties = 0;
    for (int flag = 0; flag <= 8; ++flag) {
      const uint64_t key = pack_state(req_.tx, req_.ty, flag);
      auto it = states_.find(key);
      if (it == states_.end() || it->second.cnt == 0 || it->second.dist != bound_) continue;
      ties = (ties > kTieCap - it->second.cnt) ? kTieCap : ties + it->second.cnt;
      if (!have || it->second.wgt < states_[best_key].wgt) {
        best_key = key;
        have = true;
      } else if (it->second.wgt == states_[best_key].wgt) {
        ++res.weight_tie_events;
        if (chain_of(key) < chain_of(best_key)) best_key = key;
      }
    }
    if (!have) throw EngineError("target settled but not reconstructible");
    res.tie_count = ties;
    res.weight = states_[best_key].wgt;
    std::vector<std::pair<int64_t, int64_t>> pts;
    uint64_t cur = best_key;
    while (true) {
      int64_t ix, iy;
      int flag;
      unpack_state(cur, ix, iy, flag);
      pts.push_back({ix, iy});
      const StateInfo& info = states_[cur];
      if (info.move_dir < 0) break;
      cur = info.parent;
    }
    std::reverse(pts.begin(), pts.end());
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      auto [ax, ay] = pts[k];
      auto [bx, by] = pts[k + 1];
      const int32_t h = (ay == by) ? index_height(ay, level_) : index_height(ax, level_);
      const int64_t steps = (ay == by) ? std::abs(bx - ax) : std::abs(by - ay);
      res.ledger_steps[h] += steps;
    }
    for (size_t k = 0; k < pts.size(); ++k) {
      if (k > 0 && k + 1 < pts.size()) {
        auto [ax, ay] = pts[k - 1];
        auto [bx, by] = pts[k];
        auto [cx, cy] = pts[k + 1];
        if ((ay == by && by == cy) || (ax == bx && bx == cx)) continue;  // straight-through
      }
      res.turn_points.push_back(pts[k]);
    }
    for (auto& [x, y] : res.turn_points)
      if (req_.box.on_boundary(x, y)) res.touched_boundary = true;
    res.states = std::move(states_);
    return res;
  }

  QueryRequest req_;
  Gamma gamma_;
  const WeightField& field_;
  int32_t level_;
  int32_t h_bot_ = 0, h_top_ = 0;
  std::vector<u128> step_cost_;
  std::unordered_map<uint64_t, StateInfo> states_;
  std::unordered_set<uint64_t> settled_;
  bool reached_ = false;
  u128 bound_ = 0;
  uint32_t weight_ties_ = 0;
};

}  // namespace lattice

class RouteEngine {
 public:
  explicit RouteEngine(ModelParams params) : params_(params) { params_.validate(); }

  const ModelParams& params() const { return params_; }

  // The distinguished route: exact minimum cost, ties broken by minimum
  // secondary weight, then lexicographically.  Deterministic given the
  // master seed; reversal-symmetric by canonical endpoint orientation.
  Route min_cost_route(const DyadicPoint& z1, const DyadicPoint& z2) const {
    return min_cost_route_at_level(z1, z2, effective_level(z1, z2));
  }

  Route min_cost_route_at_level(const DyadicPoint& z1, const DyadicPoint& z2,
                                int32_t level) const {
    if (z1 == z2) throw EngineError("route endpoints must differ");
    check_on_lattice(z1);
    check_on_lattice(z2);
    if (level < params_.h_min) throw EngineError("level below h_min");
    const bool flip = point_less(z2, z1);
    const DyadicPoint& a = flip ? z2 : z1;
    const DyadicPoint& b = flip ? z1 : z2;
    Route r = run_adaptive(a, b, level);
    if (flip) r = r.reversed();
    r.z1 = z1;
    r.z2 = z2;
    return r;
  }

  // Weight of a canonical unit edge at h_min: a standard normal variate,
  // exactly the sum of the weights of its two half-edges one level down.
  double secondary_weight(uint8_t axis, const DyadicScalar& line, int64_t index) const {
    WeightField field(params_.master_seed, params_.h_min);
    return field.unit_edge_weight(axis, line, index);
  }

  double segment_weight(uint8_t axis, const DyadicScalar& line, int64_t lo, int64_t hi,
                        int32_t at_level) const {
    WeightField field(params_.master_seed, params_.h_min);
    return field.segment_weight(axis, line, lo, hi, at_level);
  }

  bool route_multiresolution_consistency(const DyadicPoint& z1, const DyadicPoint& z2,
                                         int32_t h1, int32_t h2) const {
    if (h1 > h2) std::swap(h1, h2);
    Route fine = min_cost_route_at_level(z1, z2, h1);
    Route coarse = min_cost_route_at_level(z1, z2, h2);
    return fine.turn_points == coarse.turn_points && fine.cost == coarse.cost;
  }

  // sigma_2 applied to a route; with the coupled weight field this equals
  // min_cost_route(2 z1, 2 z2) exactly.
  static Route scale_route_by_two(const Route& r) {
    Route s = r;
    s.z1 = r.z1.doubled();
    s.z2 = r.z2.doubled();
    for (auto& p : s.turn_points) p = p.doubled();
    s.level = r.level + 1;
    s.total_length = r.total_length.doubled();
    PathCost c;
    c.free_length = r.cost.free_length.doubled();
    for (const auto& [h, len] : r.cost.ledger) c.ledger[h + 1] = len.doubled();
    s.cost = c;
    s.secondary_weight = r.secondary_weight * M_SQRT2;
    return s;
  }

  // The invariance wrapper: rescale by C, rotate back, translate by U_n,
  // route with the base process, and record the frame that undoes it all.
  Route continuum_route(double x1, double y1, double x2, double y2,
                        const InvarianceParams& inv) const {
    const double c = inv.scale_c, th = inv.rotation_angle;
    auto to_lattice = [&](double x, double y) {
      const double wx = c * x, wy = c * y;
      const double ct = std::cos(th), st = std::sin(th);
      return std::pair<double, double>{ct * wx + st * wy, -st * wx + ct * wy};
    };
    auto [ux, uy] = translation_vector(inv);
    auto [p1x, p1y] = to_lattice(x1, y1);
    auto [p2x, p2y] = to_lattice(x2, y2);
    const DyadicPoint s1 = snap(p1x + ux, p1y + uy);
    const DyadicPoint s2 = snap(p2x + ux, p2y + uy);
    if (s1 == s2) throw EngineError("points snap to the same lattice site");
    Route r = min_cost_route(s1, s2);
    r.frame.translate_x = ux;
    r.frame.translate_y = uy;
    r.frame.angle = th;
    r.frame.scale = 1.0 / c;
    return r;
  }

  // U_n uniform on [0, 2^n]^2, coupled over n: U_{n+1} = U_n + 2^n B_n.
  // Depth 0 disables the translation.
  std::pair<double, double> translation_vector(const InvarianceParams& inv) const {
    if (inv.translation_depth <= 0) return {0.0, 0.0};
    double ux = uniform_from_hash(hash_key({inv.seed, 0xF0, 0}));
    double uy = uniform_from_hash(hash_key({inv.seed, 0xF0, 1}));
    for (int k = 0; k < inv.translation_depth; ++k) {
      const uint64_t h = hash_key({inv.seed, 0xB1, static_cast<uint64_t>(k)});
      ux += ((h & 1) ? 1.0 : 0.0) * std::exp2(k);
      uy += ((h & 2) ? 1.0 : 0.0) * std::exp2(k);
    }
    return {ux, uy};
  }

  // Nearest lattice site at h_min; half-ties go to the smaller coordinate.
  DyadicPoint snap(double x, double y) const {
    const double u = std::exp2(-params_.h_min);
    auto snap1 = [&](double v) {
      const double idx = std::ceil(v * u - 0.5);
      if (std::abs(idx) > static_cast<double>(lattice::kMaxIndex))
        throw ResourceLimitError("snapped point outside index range");
      return DyadicScalar::at_index(static_cast<int64_t>(idx), params_.h_min);
    };
    return {snap1(x), snap1(y)};
  }

  // Coarsest lattice containing both endpoints; routes between lattice
  // points stay on their lattice, so computing there is exact.
  int32_t effective_level(const DyadicPoint& z1, const DyadicPoint& z2) const {
    int32_t lvl = kInfiniteHeight;
    for (const DyadicScalar* s : {&z1.x, &z1.y, &z2.x, &z2.y}) {
      if (s->is_zero()) continue;
      lvl = std::min(lvl, s->height().v);
    }
    if (lvl == kInfiniteHeight) throw EngineError("degenerate endpoints");
    if (lvl < params_.h_min) throw EngineError("coordinates finer than h_min");
    return lvl;
  }

  // One boxed query with explicit controls (used by the structure checks).
  lattice::QueryResult raw_query(const lattice::QueryRequest& req) const {
    WeightField field(params_.master_seed, params_.h_min);
    lattice::Query q(req, params_.gamma, field);
    return q.run();
  }

 private:
  static bool point_less(const DyadicPoint& a, const DyadicPoint& b) {
    if (!(a.x == b.x)) return a.x < b.x;
    return a.y < b.y;
  }

  void check_on_lattice(const DyadicPoint& z) const {
    if (!z.x.on_lattice(params_.h_min) || !z.y.on_lattice(params_.h_min))
      throw EngineError("point not on the h_min lattice");
  }

  Route run_adaptive(const DyadicPoint& a, const DyadicPoint& b, int32_t level) const {
    const int64_t ax = a.x.index_at(level), ay = a.y.index_at(level);
    const int64_t bx = b.x.index_at(level), by = b.y.index_at(level);
    const int64_t l1 = std::abs(bx - ax) + std::abs(by - ay);
    int64_t half = std::max<int64_t>(l1, params_.box.min_half_side);
    const int64_t cx = (ax + bx) / 2, cy = (ay + by) / 2;
    WeightField field(params_.master_seed, params_.h_min);
    std::optional<lattice::QueryResult> prev;
    for (int32_t gen = 0; gen <= params_.box.max_doublings; ++gen) {
      lattice::QueryRequest req;
      req.sx = ax;
      req.sy = ay;
      req.tx = bx;
      req.ty = by;
      req.level = level;
      req.box = {cx - half, cx + half, cy - half, cy + half};
      lattice::Query q(req, params_.gamma, field);
      lattice::QueryResult cur = q.run();
      if (!cur.reached) throw EngineError("target unreachable inside box");
      if (prev && prev->ledger_steps == cur.ledger_steps &&
          prev->turn_points == cur.turn_points && !prev->touched_boundary) {
        return assemble_route(a, b, level, *prev, gen - 1, half / 2);
      }
      prev = std::move(cur);
      half *= 2;
    }
    throw ResourceLimitError("search box expansion limit reached");
  }

  Route assemble_route(const DyadicPoint& a, const DyadicPoint& b, int32_t level,
                       const lattice::QueryResult& qr, int32_t generations,
                       int64_t half) const {
    Route r;
    r.z1 = a;
    r.z2 = b;
    r.level = level;
    for (auto [ix, iy] : qr.turn_points)
      r.turn_points.push_back(
          {DyadicScalar::at_index(ix, level), DyadicScalar::at_index(iy, level)});
    int64_t steps_total = 0;
    for (const auto& [h, s] : qr.ledger_steps) {
      steps_total = checked_add(steps_total, s);
      const DyadicScalar len = DyadicScalar::at_index(s, level);
      if (h == kInfiniteHeight)
        r.cost.free_length = r.cost.free_length + len;
      else
        r.cost.ledger[h] = len;
    }
    r.total_length = DyadicScalar::at_index(steps_total, level);
    r.secondary_weight = qr.weight;
    r.tie_count = qr.tie_count;
    r.weight_tie_events = qr.weight_tie_events;
    r.settled_states = qr.settled;
    r.box_generations = generations;
    r.box_half_side_units = half;
    return r;
  }

  ModelParams params_;
};

}  // namespace sirsn
