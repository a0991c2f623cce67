#include "pm/decomposition.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pm {

PersistenceDiagram::PersistenceDiagram(std::vector<DiagramPoint> points) {
  for (const auto& pt : points) {
    if (pt.mult == 0) throw std::invalid_argument("diagram point with zero multiplicity");
    if (pt.death <= ExtRational(pt.birth)) throw std::invalid_argument("diagram point with birth >= death");
  }
  std::sort(points.begin(), points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
    return Bar{a.birth, a.death} < Bar{b.birth, b.death};
  });
  for (auto& pt : points) {
    if (!points_.empty() && points_.back().birth == pt.birth && points_.back().death == pt.death) {
      points_.back().mult += pt.mult;
    } else {
      points_.push_back(pt);
    }
  }
}

std::vector<Bar> PersistenceDiagram::bars() const {
  std::vector<Bar> out;
  for (const auto& pt : points_) {
    for (std::size_t k = 0; k < pt.mult; ++k) out.push_back({pt.birth, pt.death});
  }
  return out;
}

std::size_t PersistenceDiagram::total_multiplicity() const {
  std::size_t n = 0;
  for (const auto& pt : points_) n += pt.mult;
  return n;
}

RankInvariant rank_invariant(const GridModule& u) {
  RankInvariant ri;
  ri.grid = u.grid();
  const std::size_t k = u.size();
  ri.r.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    Matrix acc = Matrix::identity(u.prime(), u.dims()[i]);
    ri.r[i].push_back(u.dims()[i]);
    for (std::size_t j = i + 1; j < k; ++j) {
      acc = u.maps()[j - 1] * acc;
      ri.r[i].push_back(rank(acc));
    }
  }
  return ri;
}

PersistenceDiagram barcode(const GridModule& u) {
  const auto ri = rank_invariant(u);
  const std::size_t k = u.size();
  // r(i, j) with r(-1, .) = 0; indices shifted by one to allow i = -1.
  auto r = [&](std::ptrdiff_t i, std::size_t j) -> long long {
    if (i < 0) return 0;
    return static_cast<long long>(ri.at(static_cast<std::size_t>(i), j));
  };
  std::vector<DiagramPoint> points;
  auto emit = [&](std::size_t i, const ExtRational& death, long long m) {
    if (m < 0) throw std::logic_error("negative bar multiplicity in barcode");
    if (m > 0) points.push_back({u.grid()[i], death, static_cast<std::size_t>(m)});
  };
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    for (std::size_t j = i + 1; j < k; ++j) {
      emit(i, ExtRational(u.grid()[j]), r(ii, j - 1) - r(ii, j) - r(ii - 1, j - 1) + r(ii - 1, j));
    }
    emit(i, ExtRational::infinity(), r(ii, k - 1) - r(ii - 1, k - 1));
  }
  return PersistenceDiagram(std::move(points));
}

GridModule module_from_diagram(const PersistenceDiagram& dgm, std::uint32_t prime) {
  const auto bars = dgm.bars();
  std::set<Rational> values;
  for (const auto& b : bars) {
    values.insert(b.birth);
    if (b.death.is_finite()) values.insert(b.death.value());
  }
  std::vector<Rational> grid(values.begin(), values.end());
  auto alive = [&](std::size_t bar, const Rational& t) {
    return bars[bar].birth <= t && ExtRational(t) < bars[bar].death;
  };
  // Basis of U(t_i): the bars alive at t_i, in bar order.
  std::vector<std::vector<std::size_t>> active(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t b = 0; b < bars.size(); ++b) {
      if (alive(b, grid[i])) active[i].push_back(b);
    }
  }
  std::vector<std::size_t> dims;
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    dims.push_back(active[i].size());
    if (i == 0) continue;
    Matrix m(prime, active[i].size(), active[i - 1].size());
    for (std::size_t c = 0; c < active[i - 1].size(); ++c) {
      auto it = std::find(active[i].begin(), active[i].end(), active[i - 1][c]);
      if (it != active[i].end()) m.set(static_cast<std::size_t>(it - active[i].begin()), c, 1);
    }
    maps.push_back(std::move(m));
  }
  return GridModule(prime, std::move(grid), std::move(dims), std::move(maps));
}

}  // namespace pm
