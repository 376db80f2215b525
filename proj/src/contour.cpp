#include "txn/contour.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace txn {

namespace {

struct Segment {
  long a, b; // edge ids
  bool used = false;
};

} // namespace

ContourSet marching_squares(const Eigen::MatrixXd &values, const Eigen::VectorXd &x,
                            const Eigen::VectorXd &y, double level) {
  const Eigen::Index ny = values.rows(), nx = values.cols();
  if (x.size() != nx || y.size() != ny)
    throw std::invalid_argument("marching_squares: coordinate sizes do not match the grid");
  ContourSet out;
  if (nx < 2 || ny < 2)
    return out;

  // Edge ids: horizontal edge right of (r, c) is 2 (r nx + c), vertical edge
  // above (r, c) is 2 (r nx + c) + 1.
  auto h_edge = [nx](Eigen::Index r, Eigen::Index c) { return long(2 * (r * nx + c)); };
  auto v_edge = [nx](Eigen::Index r, Eigen::Index c) { return long(2 * (r * nx + c) + 1); };

  auto edge_point = [&](long id) -> Eigen::Vector2d {
    const long node = id / 2;
    const Eigen::Index r = node / nx, c = node % nx;
    const bool vertical = id % 2 == 1;
    const Eigen::Index r2 = vertical ? r + 1 : r, c2 = vertical ? c : c + 1;
    const double va = values(r, c), vb = values(r2, c2);
    const double t = (level - va) / (vb - va);
    return {x[c] + t * (x[c2] - x[c]), y[r] + t * (y[r2] - y[r])};
  };

  std::vector<Segment> segs;
  for (Eigen::Index r = 0; r + 1 < ny; ++r) {
    for (Eigen::Index c = 0; c + 1 < nx; ++c) {
      const double v0 = values(r, c), v1 = values(r, c + 1), v2 = values(r + 1, c + 1),
                   v3 = values(r + 1, c);
      if (std::isnan(v0) || std::isnan(v1) || std::isnan(v2) || std::isnan(v3)) {
        ++out.skipped_cells;
        continue;
      }
      const int idx = (v0 > level) | (v1 > level) << 1 | (v2 > level) << 2 | (v3 > level) << 3;
      if (idx == 0 || idx == 15)
        continue;
      const std::array<long, 4> e = {h_edge(r, c), v_edge(r, c + 1), h_edge(r + 1, c),
                                     v_edge(r, c)};
      auto add = [&](int i, int j) { segs.push_back({e[std::size_t(i)], e[std::size_t(j)]}); };
      if (idx == 5 || idx == 10) {
        out.saddle_cells.emplace_back(int(r), int(c));
        const bool centre = 0.25 * (v0 + v1 + v2 + v3) > level;
        // keep the diagonal that shares the centre's side connected
        if ((idx == 5) == centre) {
          add(0, 1);
          add(2, 3);
        } else {
          add(3, 0);
          add(1, 2);
        }
        continue;
      }
      // the two crossed edges, in edge order
      int first = -1, second = -1;
      const std::array<bool, 4> above = {v0 > level, v1 > level, v2 > level, v3 > level};
      for (int i = 0; i < 4; ++i)
        if (above[std::size_t(i)] != above[std::size_t((i + 1) % 4)])
          (first < 0 ? first : second) = i;
      add(first, second);
    }
  }

  std::unordered_map<long, std::array<int, 2>> by_edge;
  by_edge.reserve(segs.size() * 2);
  for (int i = 0; i < int(segs.size()); ++i)
    for (long id : {segs[std::size_t(i)].a, segs[std::size_t(i)].b}) {
      auto [it, fresh] = by_edge.try_emplace(id, std::array<int, 2>{i, -1});
      if (!fresh)
        it->second[1] = i;
    }

  auto other_segment = [&](long edge, int seg) {
    const auto &pair = by_edge.at(edge);
    return pair[0] == seg ? pair[1] : pair[0];
  };

  for (int s = 0; s < int(segs.size()); ++s) {
    if (segs[std::size_t(s)].used)
      continue;
    segs[std::size_t(s)].used = true;
    std::deque<long> chain = {segs[std::size_t(s)].a, segs[std::size_t(s)].b};
    bool closed = false;
    // walk forward from the tail, then backward from the head
    for (int dir = 0; dir < 2 && !closed; ++dir) {
      int cur = s;
      while (true) {
        const long edge = dir == 0 ? chain.back() : chain.front();
        const int next = other_segment(edge, cur);
        if (next < 0 || segs[std::size_t(next)].used)
          break;
        auto &n = segs[std::size_t(next)];
        n.used = true;
        const long far = n.a == edge ? n.b : n.a;
        if (far == (dir == 0 ? chain.front() : chain.back())) {
          closed = true;
          break;
        }
        if (dir == 0)
          chain.push_back(far);
        else
          chain.push_front(far);
        cur = next;
      }
    }
    Polyline pl;
    pl.closed = closed;
    pl.points.reserve(chain.size());
    for (long id : chain)
      pl.points.push_back(edge_point(id));
    out.lines.push_back(std::move(pl));
  }
  return out;
}

} // namespace txn
