#include "pm/kan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace pm {

KanMode parse_kan_mode(const std::string& s) {
  if (s == "lan") return KanMode::Lan;
  if (s == "ran") return KanMode::Ran;
  if (s == "image") return KanMode::Image;
  throw std::invalid_argument("unknown extension mode '" + s + "' (expected lan, ran or image)");
}

std::string to_string(KanMode mode) {
  switch (mode) {
    case KanMode::Lan:
      return "lan";
    case KanMode::Ran:
      return "ran";
    case KanMode::Image:
      return "image";
  }
  return "image";
}

namespace {

// Value of the extension at one (x, t).
struct Value {
  // Per point of A: position among the anchors, or -1 at infinite distance.
  std::vector<std::ptrdiff_t> anchor_pos;
  std::vector<std::size_t> anchors;
  // Lan: top of each anchor's chain, t - d(a,x). Ran: bottom, t + d(a,x).
  std::vector<Rational> lan_times, ran_times;
  std::vector<std::size_t> lan_offsets, ran_offsets;
  std::size_t lan_total = 0, ran_total = 0;
  Matrix proj;   // lan_dim x lan_total
  Matrix incl;   // ran_total x ran_dim
  Matrix basis;  // ran_dim x image_dim
  std::size_t dim = 0;
};

}  // namespace

struct KanExtension::Impl {
  CoherentSystem sys;
  FiniteMetricSpace m;
  KanMode mode;
  std::vector<std::size_t> a_in_m;
  std::vector<std::ptrdiff_t> m_in_a;
  std::vector<std::vector<ModuleMorphism>> phi;  // phi[c][a], identity on the diagonal
  std::map<std::pair<std::size_t, Rational>, Value> cache;

  std::uint32_t p() const { return sys.prime(); }
  const GridModule& u(std::size_t a) const { return sys.module(a); }
  const ExtRational& da(std::size_t a, std::size_t c) const { return sys.space().distance(a, c); }
  const ExtRational& dx(std::size_t a, std::size_t x) const { return m.distance(a_in_m[a], x); }

  // G((c, r) <= (a, s)).
  Matrix garrow(std::size_t c, const Rational& r, std::size_t a, const Rational& s) const {
    if (c == a) return u(a).map_between(r, s);
    return u(a).map_between(r + da(c, a).value(), s) * phi[c][a].component_at(r);
  }

  bool need_lan() const { return mode != KanMode::Ran; }
  bool need_ran() const { return mode != KanMode::Lan; }

  Value compute(std::size_t x, const Rational& t) const {
    const std::size_t n = sys.space().size();
    Value v;
    v.anchor_pos.assign(n, -1);
    for (std::size_t a = 0; a < n; ++a) {
      if (dx(a, x).is_infinite()) continue;
      v.anchor_pos[a] = static_cast<std::ptrdiff_t>(v.anchors.size());
      v.anchors.push_back(a);
      v.lan_times.push_back(t - dx(a, x).value());
      v.ran_times.push_back(t + dx(a, x).value());
    }
    const std::size_t k = v.anchors.size();
    const std::ptrdiff_t self = m_in_a[x] >= 0 ? v.anchor_pos[static_cast<std::size_t>(m_in_a[x])] : -1;

    if (need_lan()) {
      for (std::size_t i = 0; i < k; ++i) {
        v.lan_offsets.push_back(v.lan_total);
        v.lan_total += u(v.anchors[i]).dim_at(v.lan_times[i]);
      }
      std::vector<Matrix> blocks;
      std::size_t width = 0;
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = i + 1; j < k; ++j) {
            const auto a = v.anchors[i], b = v.anchors[j];
            if (da(c, a).is_infinite() || da(c, b).is_infinite()) continue;
            const Rational r = std::min(v.lan_times[i] - da(c, a).value(), v.lan_times[j] - da(c, b).value());
            const std::size_t dc = u(c).dim_at(r);
            if (dc == 0) continue;
            Matrix blk(p(), v.lan_total, dc);
            blk.set_block(v.lan_offsets[i], 0, garrow(c, r, a, v.lan_times[i]));
            blk.set_block(v.lan_offsets[j], 0, garrow(c, r, b, v.lan_times[j]).negated());
            width += dc;
            blocks.push_back(std::move(blk));
          }
        }
      }
      Matrix rel(p(), v.lan_total, width);
      std::size_t col = 0;
      for (const auto& b : blocks) {
        rel.set_block(0, col, b);
        col += b.cols();
      }
      auto coker = cokernel_presentation(rel);
      v.proj = std::move(coker.proj);
      if (self >= 0) {
        const auto s = static_cast<std::size_t>(self);
        const std::size_t ds = u(v.anchors[s]).dim_at(v.lan_times[s]);
        auto inv = inverse(v.proj.block(0, v.lan_offsets[s], v.proj.rows(), ds));
        if (!inv) throw std::logic_error("left extension does not restrict to the module on A");
        v.proj = *inv * v.proj;
      }
    }

    if (need_ran()) {
      for (std::size_t i = 0; i < k; ++i) {
        v.ran_offsets.push_back(v.ran_total);
        v.ran_total += u(v.anchors[i]).dim_at(v.ran_times[i]);
      }
      std::vector<Matrix> blocks;
      std::size_t height = 0;
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = i + 1; j < k; ++j) {
            const auto a = v.anchors[i], b = v.anchors[j];
            if (da(a, c).is_infinite() || da(b, c).is_infinite()) continue;
            const Rational r = std::max(v.ran_times[i] + da(a, c).value(), v.ran_times[j] + da(b, c).value());
            const std::size_t dc = u(c).dim_at(r);
            if (dc == 0) continue;
            Matrix blk(p(), dc, v.ran_total);
            blk.set_block(0, v.ran_offsets[i], garrow(a, v.ran_times[i], c, r));
            blk.set_block(0, v.ran_offsets[j], garrow(b, v.ran_times[j], c, r).negated());
            height += dc;
            blocks.push_back(std::move(blk));
          }
        }
      }
      Matrix cons(p(), height, v.ran_total);
      std::size_t row = 0;
      for (const auto& b : blocks) {
        cons.set_block(row, 0, b);
        row += b.rows();
      }
      v.incl = kernel_basis(cons);
      if (self >= 0) {
        const auto s = static_cast<std::size_t>(self);
        const std::size_t ds = u(v.anchors[s]).dim_at(v.ran_times[s]);
        auto inv = inverse(v.incl.block(v.ran_offsets[s], 0, ds, v.incl.cols()));
        if (!inv) throw std::logic_error("right extension does not restrict to the module on A");
        v.incl = v.incl * *inv;
      }
    }

    switch (mode) {
      case KanMode::Lan:
        v.dim = v.proj.rows();
        break;
      case KanMode::Ran:
        v.dim = v.incl.cols();
        break;
      case KanMode::Image: {
        // Comparison map: block (b, a) is G(top_a <= bottom_b).
        Matrix kmat(p(), v.ran_total, v.lan_total);
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            kmat.set_block(v.ran_offsets[j], v.lan_offsets[i],
                           garrow(v.anchors[i], v.lan_times[i], v.anchors[j], v.ran_times[j]));
          }
        }
        auto in_ran = solve(v.incl, kmat);
        if (!in_ran) throw std::logic_error("comparison map does not land in the right extension");
        const Matrix c = induced_map_on_quotients(v.proj, *in_ran, Matrix::identity(p(), v.incl.cols()));
        v.basis = image_basis(c);
        v.dim = v.basis.cols();
        break;
      }
    }
    return v;
  }

  const Value& value(std::size_t x, const Rational& t) {
    auto key = std::make_pair(x, t);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, compute(x, t)).first;
    return it->second;
  }

  Matrix lan_arrow(const Value& vs, const Value& vt) const {
    Matrix map(p(), vt.lan_total, vs.lan_total);
    for (std::size_t i = 0; i < vs.anchors.size(); ++i) {
      const auto a = vs.anchors[i];
      const auto j = static_cast<std::size_t>(vt.anchor_pos[a]);
      map.set_block(vt.lan_offsets[j], vs.lan_offsets[i], u(a).map_between(vs.lan_times[i], vt.lan_times[j]));
    }
    return induced_map_on_quotients(vs.proj, map, vt.proj);
  }

  Matrix ran_arrow(const Value& vs, const Value& vt) const {
    Matrix map(p(), vt.ran_total, vs.ran_total);
    for (std::size_t j = 0; j < vt.anchors.size(); ++j) {
      const auto a = vt.anchors[j];
      const auto i = static_cast<std::size_t>(vs.anchor_pos[a]);
      map.set_block(vt.ran_offsets[j], vs.ran_offsets[i], u(a).map_between(vs.ran_times[i], vt.ran_times[j]));
    }
    auto r = solve(vt.incl, map * vs.incl);
    if (!r) throw std::logic_error("right extension arrow does not preserve the limit");
    return *r;
  }

  Matrix arrow(std::size_t x, const Rational& s, std::size_t y, const Rational& t) {
    if (m.distance(x, y) > ExtRational(t - s)) throw std::invalid_argument("arrow between unrelated spacetime points");
    const Value& vs = value(x, s);
    const Value& vt = value(y, t);
    switch (mode) {
      case KanMode::Lan:
        return lan_arrow(vs, vt);
      case KanMode::Ran:
        return ran_arrow(vs, vt);
      case KanMode::Image: {
        auto r = solve(vt.basis, ran_arrow(vs, vt) * vs.basis);
        if (!r) throw std::logic_error("image extension arrow does not preserve the image");
        return *r;
      }
    }
    return {};
  }

  std::vector<Rational> critical_times(std::size_t x) const {
    const std::size_t n = sys.space().size();
    std::set<Rational> gammas;
    for (const auto& mod : sys.modules()) gammas.insert(mod.grid().begin(), mod.grid().end());
    // Offsets d(a,x) + d(c,a) - d(c,b) over anchors a and points c, b of A.
    std::set<Rational> offsets;
    for (std::size_t a = 0; a < n; ++a) {
      if (dx(a, x).is_infinite()) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (da(c, a).is_infinite()) continue;
        for (std::size_t b = 0; b < n; ++b) {
          if (da(c, b).is_infinite()) continue;
          offsets.insert(dx(a, x).value() + da(c, a).value() - da(c, b).value());
        }
      }
    }
    std::set<Rational> out;
    for (const auto& g : gammas) {
      for (const auto& o : offsets) {
        if (need_lan()) out.insert(g + o);
        if (need_ran()) out.insert(g - o);
      }
    }
    return {out.begin(), out.end()};
  }
};

KanExtension::KanExtension(CoherentSystem system, FiniteMetricSpace m, KanMode mode) : impl_(std::make_unique<Impl>()) {
  auto report = verify_coherent(system);
  if (!report.coherent) throw std::invalid_argument("extension of an incoherent system: " + report.violations.front().message);
  impl_->sys = std::move(system);
  impl_->m = std::move(m);
  impl_->mode = mode;
  const auto& a_space = impl_->sys.space();
  for (const auto& l : a_space.labels()) {
    if (!impl_->m.contains(l)) throw std::invalid_argument("point '" + l + "' of A is missing from the target space");
    impl_->a_in_m.push_back(impl_->m.index_of(l));
  }
  for (std::size_t i = 0; i < a_space.size(); ++i) {
    for (std::size_t j = 0; j < a_space.size(); ++j) {
      if (impl_->m.distance(impl_->a_in_m[i], impl_->a_in_m[j]) != a_space.distance(i, j)) {
        throw std::invalid_argument("A is not a metric subspace of the target space");
      }
    }
  }
  impl_->m_in_a.assign(impl_->m.size(), -1);
  for (std::size_t i = 0; i < a_space.size(); ++i) impl_->m_in_a[impl_->a_in_m[i]] = static_cast<std::ptrdiff_t>(i);
  const std::size_t n = a_space.size();
  impl_->phi.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      impl_->phi[c].push_back(a_space.distance(c, a).is_finite() ? impl_->sys.arrow(c, a) : ModuleMorphism());
    }
  }
}

KanExtension::~KanExtension() = default;
KanExtension::KanExtension(KanExtension&&) noexcept = default;
KanExtension& KanExtension::operator=(KanExtension&&) noexcept = default;

const CoherentSystem& KanExtension::system() const { return impl_->sys; }
const FiniteMetricSpace& KanExtension::space() const { return impl_->m; }
KanMode KanExtension::mode() const { return impl_->mode; }

std::size_t KanExtension::dim(std::size_t x, const Rational& t) { return impl_->value(x, t).dim; }

Matrix KanExtension::arrow(std::size_t x, const Rational& s, std::size_t y, const Rational& t) {
  return impl_->arrow(x, s, y, t);
}

std::vector<Rational> KanExtension::critical_times(std::size_t x) const { return impl_->critical_times(x); }

GridModule KanExtension::module_at(std::size_t x) {
  const auto times = critical_times(x);
  const auto p = impl_->p();
  if (times.empty()) return GridModule::zero(p);
  if (dim(x, times.front() - 1) != 0) throw std::logic_error("extension is nonzero before its first critical time");
  std::vector<std::size_t> dims;
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < times.size(); ++i) {
    dims.push_back(dim(x, times[i]));
    const Rational next = i + 1 < times.size() ? times[i + 1] : times[i] + 2;
    const Rational mid = (times[i] + next) / 2;
    if (!(arrow(x, times[i], x, mid) == Matrix::identity(p, dims.back()))) {
      throw std::logic_error("extension changes between critical times");
    }
    if (i + 1 < times.size()) maps.push_back(arrow(x, times[i], x, times[i + 1]));
  }
  return compress(GridModule(p, times, std::move(dims), std::move(maps)));
}

CoherentSystem KanExtension::extended() {
  const auto& m = impl_->m;
  std::vector<GridModule> modules;
  for (std::size_t x = 0; x < m.size(); ++x) modules.push_back(module_at(x));
  CoherentSystem::MorphismMap phis;
  for (std::size_t x = 0; x < m.size(); ++x) {
    for (std::size_t y = 0; y < m.size(); ++y) {
      if (x == y || m.distance(x, y).is_infinite()) continue;
      const Rational d = m.distance(x, y).value();
      auto fn = [&](const Rational& s) { return arrow(x, s, y, s + d); };
      phis.emplace(std::make_pair(x, y), ModuleMorphism(modules[x], modules[y], d, fn));
    }
  }
  return CoherentSystem(m, std::move(modules), std::move(phis));
}

CoherentSystem extend(const CoherentSystem& s, const FiniteMetricSpace& m, KanMode mode) {
  return KanExtension(s, m, mode).extended();
}

std::size_t SegmentFamily::index_of(const Rational& r) const {
  auto it = std::find(positions.begin(), positions.end(), r);
  if (it == positions.end()) throw std::out_of_range("position " + to_string(r) + " is not in the family");
  return static_cast<std::size_t>(it - positions.begin());
}

SegmentFamily segment_interpolation(const GridModule& u0, const GridModule& ue, const ModuleMorphism& phi,
                                    const ModuleMorphism& psi, const Rational& e, const std::vector<Rational>& samples,
                                    KanMode mode) {
  if (e < 0) throw std::invalid_argument("segment_interpolation: negative e");
  if (!semantically_equal(phi.source(), u0) || !semantically_equal(phi.target(), ue)) {
    throw std::invalid_argument("segment_interpolation: phi does not go from the first module to the second");
  }
  if (!verify_interleaving(phi, psi, e)) throw std::invalid_argument("segment_interpolation: not an interleaving");
  std::set<Rational> pos{Rational(0), e};
  for (const auto& r : samples) {
    if (r < 0 || r > e) throw std::invalid_argument("segment_interpolation: sample " + to_string(r) + " outside [0, e]");
    pos.insert(r);
  }
  SegmentFamily fam;
  fam.positions.assign(pos.begin(), pos.end());
  // With e = 0 both ends share a position; keep them as two points.
  if (e == Rational(0)) fam.positions = {Rational(0), Rational(0)};
  const std::size_t n = fam.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      fam.labels.push_back("start");
    } else if (i + 1 == n) {
      fam.labels.push_back("end");
    } else {
      fam.labels.push_back("s:" + to_string(fam.positions[i]));
    }
  }
  std::vector<std::vector<ExtRational>> dist(n, std::vector<ExtRational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = abs(fam.positions[i] - fam.positions[j]);
  }
  FiniteMetricSpace line(fam.labels, dist);
  FiniteMetricSpace ends = line.subspace({0, n - 1});
  CoherentSystem::MorphismMap phis;
  phis.emplace(std::make_pair(std::size_t{0}, std::size_t{1}), phi);
  phis.emplace(std::make_pair(std::size_t{1}, std::size_t{0}), psi);
  CoherentSystem two(ends, {u0, ue}, std::move(phis));
  fam.system = extend(two, line, mode);
  return fam;
}

FiniteMetricSpace equilateral_space(std::size_t n, const Rational& e) {
  std::vector<std::string> labels;
  std::vector<std::vector<ExtRational>> dist(n, std::vector<ExtRational>(n, ExtRational(2 * e)));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("v" + std::to_string(i));
    dist[i][i] = ExtRational(0);
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

namespace {

CoherentSystem vertex_system(const std::vector<GridModule>& modules, const PairMorphisms& phis, const Rational& e) {
  auto space = equilateral_space(modules.size(), e);
  CoherentSystem::MorphismMap map;
  for (std::size_t i = 0; i < modules.size(); ++i) {
    for (std::size_t j = 0; j < modules.size(); ++j) {
      if (i == j) continue;
      auto it = phis.find({i, j});
      if (it == phis.end()) {
        throw std::invalid_argument("missing morphism v" + std::to_string(i) + "->v" + std::to_string(j));
      }
      map.emplace(it->first, it->second);
    }
  }
  return CoherentSystem(std::move(space), modules, std::move(map));
}

}  // namespace

StarResult star_interpolation(const std::vector<GridModule>& modules, const PairMorphisms& phis, const Rational& e,
                              KanMode mode) {
  if (modules.empty()) throw std::invalid_argument("star_interpolation: no modules");
  if (e < 0) throw std::invalid_argument("star_interpolation: negative e");
  auto sys = vertex_system(modules, phis, e);
  const std::size_t n = modules.size();
  auto labels = sys.space().labels();
  labels.push_back("center");
  std::vector<std::vector<ExtRational>> dist(n + 1, std::vector<ExtRational>(n + 1, ExtRational(e)));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (i == j) {
        dist[i][j] = ExtRational(0);
      } else if (i < n && j < n) {
        dist[i][j] = ExtRational(2 * e);
      }
    }
  }
  FiniteMetricSpace star(std::move(labels), std::move(dist));
  StarResult out;
  out.extended = extend(sys, star, mode);
  out.center = out.extended.module(n);
  return out;
}

namespace {

std::optional<Rational> exact_sqrt(const Rational& r) {
  auto isqrt = [](std::int64_t v) -> std::optional<std::int64_t> {
    if (v < 0) return std::nullopt;
    auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<long double>(v))));
    for (std::int64_t c = std::max<std::int64_t>(0, s - 2); c <= s + 2; ++c) {
      if (c * c == v) return c;
    }
    return std::nullopt;
  };
  auto n = isqrt(r.numerator());
  auto d = isqrt(r.denominator());
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

// Smallest multiple of 1/precision whose square is at least r.
Rational sqrt_round_up(const Rational& r, std::int64_t precision) {
  auto approx = static_cast<std::int64_t>(
      std::ceil(std::sqrt(static_cast<long double>(r.numerator()) / static_cast<long double>(r.denominator())) *
                static_cast<long double>(precision)));
  Rational q(std::max<std::int64_t>(approx - 2, 0), precision);
  while (q * q < r) q += Rational(1, precision);
  return q;
}

}  // namespace

FiniteMetricSpace simplex_space(std::size_t n, const Rational& e, const std::vector<std::vector<Rational>>& weights,
                                const SimplexOptions& opts) {
  if (opts.precision <= 0) throw std::invalid_argument("simplex precision must be positive");
  std::vector<std::vector<Rational>> pts;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> w(n, Rational(0));
    w[i] = 1;
    pts.push_back(std::move(w));
    labels.push_back("v" + std::to_string(i));
  }
  for (std::size_t q = 0; q < weights.size(); ++q) {
    const auto& w = weights[q];
    if (w.size() != n) throw std::invalid_argument("weight vector has the wrong length");
    Rational sum(0);
    for (const auto& c : w) {
      if (c < 0) throw std::invalid_argument("negative barycentric weight");
      sum += c;
    }
    if (sum != Rational(1)) throw std::invalid_argument("barycentric weights must sum to 1");
    pts.push_back(w);
    labels.push_back("q" + std::to_string(q));
  }
  const std::size_t total = pts.size();
  std::vector<std::vector<ExtRational>> dist(total, std::vector<ExtRational>(total, ExtRational(0)));
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      if (i == j) continue;
      Rational d(0);
      if (opts.placement == SimplexPlacement::Range) {
        Rational hi(0), lo(0);
        for (std::size_t k = 0; k < n; ++k) {
          const Rational diff = pts[i][k] - pts[j][k];
          if (k == 0 || diff > hi) hi = diff;
          if (k == 0 || diff < lo) lo = diff;
        }
        d = e * (hi - lo);
      } else {
        Rational sq(0);
        for (std::size_t k = 0; k < n; ++k) sq += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
        const Rational d2 = 2 * e * e * sq;
        auto exact = exact_sqrt(d2);
        d = exact ? *exact : sqrt_round_up(d2, opts.precision);
      }
      dist[i][j] = ExtRational(d);
    }
  }
  // The constructor rejects a rounded table that breaks the triangle inequality.
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

std::vector<GridModule> simplex_interpolation(const std::vector<GridModule>& modules, const PairMorphisms& phis,
                                              const Rational& e, const std::vector<std::vector<Rational>>& weights,
                                              const SimplexOptions& opts) {
  if (modules.empty()) throw std::invalid_argument("simplex_interpolation: no modules");
  auto sys = vertex_system(modules, phis, e);
  auto space = simplex_space(modules.size(), e, weights, opts);
  KanExtension ext(std::move(sys), space, opts.mode);
  std::vector<GridModule> out;
  for (std::size_t q = 0; q < weights.size(); ++q) out.push_back(ext.module_at(modules.size() + q));
  return out;
}

}  // namespace pm
