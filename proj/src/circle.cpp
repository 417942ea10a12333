#include "qmlab/circle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qmlab {

namespace {

void validate_table(const std::vector<Knot>& knots, const char* what) {
  if (knots.empty()) throw std::invalid_argument(std::string{what} + ": no knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].first < 0 || knots[i].first >= 1)
      throw std::invalid_argument(std::string{what} + ": knot abscissa outside [0,1)");
    if (i > 0 && !(knots[i - 1].first < knots[i].first))
      throw std::invalid_argument(std::string{what} + ": abscissae must increase strictly");
    if (i > 0 && !(knots[i - 1].second < knots[i].second))
      throw std::invalid_argument(std::string{what} + ": values must increase strictly (not monotone)");
  }
  if (!(knots.back().second < knots.front().second + 1))
    throw std::invalid_argument(std::string{what} + ": values must stay below the first value + 1");
}

Rational slope(const Knot& a, const Knot& b) { return (b.second - a.second) / (b.first - a.first); }

// Drops knots whose neighbouring segments have equal slope (cyclically).
std::vector<Knot> simplify(std::vector<Knot> knots) {
  bool changed = true;
  while (changed && knots.size() > 1) {
    changed = false;
    const std::size_t m = knots.size();
    for (std::size_t i = 0; i < m; ++i) {
      Knot prev = i == 0 ? Knot{knots[m - 1].first - 1, knots[m - 1].second - 1} : knots[i - 1];
      Knot next = i + 1 == m ? Knot{knots[0].first + 1, knots[0].second + 1} : knots[i + 1];
      if (slope(prev, knots[i]) == slope(knots[i], next)) {
        knots.erase(knots.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return knots;
}

std::vector<Knot> normalize_knots(std::vector<Knot> knots) {
  for (auto& k : knots) {
    Integer n = floor(k.first);
    k.first -= n;
    k.second -= n;
  }
  std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.first < b.first; });
  return knots;
}

}  // namespace

CircleLift::CircleLift(Kind kind, Rational angle, std::vector<Knot> knots)
    : kind_(kind), angle_(std::move(angle)), knots_(std::move(knots)) {}

CircleLift CircleLift::rotation(Rational angle) { return CircleLift{Kind::rotation, std::move(angle), {}}; }

CircleLift CircleLift::piecewise_linear(std::vector<Knot> knots) {
  validate_table(knots, "piecewise_linear");
  return CircleLift{Kind::piecewise_linear, 0, std::move(knots)};
}

CircleLift CircleLift::sampled(std::vector<Knot> table) {
  validate_table(table, "sampled");
  // The table must be invariant: every image lands on a tabulated point mod 1.
  for (const auto& k : table) {
    const Rational t = frac(k.second);
    bool found = std::any_of(table.begin(), table.end(), [&](const Knot& j) { return j.first == t; });
    if (!found) throw std::invalid_argument("sampled: image " + to_string(k.second) + " leaves the table");
  }
  return CircleLift{Kind::sampled, 0, std::move(table)};
}

Rational CircleLift::operator()(const Rational& x) const {
  if (kind_ == Kind::rotation) return x + angle_;
  const Integer n = floor(x);
  const Rational t = x - n;
  if (kind_ == Kind::sampled) {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t, [](const Knot& k, const Rational& v) { return k.first < v; });
    if (it == knots_.end() || it->first != t)
      throw std::domain_error("sampled lift evaluated off its table at " + to_string(x));
    return it->second + n;
  }
  const std::size_t m = knots_.size();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t, [](const Rational& v, const Knot& k) { return v < k.first; });
  const auto j = static_cast<std::size_t>(it - knots_.begin());
  Knot left = j == 0 ? Knot{knots_[m - 1].first - 1, knots_[m - 1].second - 1} : knots_[j - 1];
  Knot right = j == m ? Knot{knots_[0].first + 1, knots_[0].second + 1} : knots_[j];
  return left.second + (t - left.first) * slope(left, right) + n;
}

CircleLift CircleLift::inverse() const {
  if (kind_ == Kind::rotation) return rotation(-angle_);
  std::vector<Knot> inv;
  inv.reserve(knots_.size());
  for (const auto& k : knots_) inv.emplace_back(k.second, k.first);
  inv = normalize_knots(std::move(inv));
  return CircleLift{kind_, 0, std::move(inv)};
}

CircleLift CircleLift::compose(const CircleLift& inner) const {
  if (kind_ == Kind::rotation && inner.kind_ == Kind::rotation) return rotation(angle_ + inner.angle_);

  std::vector<Rational> points;
  const bool sampled_result = kind_ == Kind::sampled || inner.kind_ == Kind::sampled;
  if (inner.kind_ == Kind::sampled) {
    for (const auto& k : inner.knots_) points.push_back(k.first);
  } else {
    const CircleLift inner_inv = inner.inverse();
    if (kind_ != Kind::sampled)
      for (const auto& k : inner.kind_ == Kind::rotation ? std::vector<Knot>{{Rational{0}, inner.angle_}} : inner.knots_)
        points.push_back(k.first);
    const auto outer_knots = kind_ == Kind::rotation ? std::vector<Knot>{{Rational{0}, angle_}} : knots_;
    for (const auto& k : outer_knots) points.push_back(frac(inner_inv(k.first)));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<Knot> knots;
  for (const auto& p : points) knots.emplace_back(p, (*this)(inner(p)));
  if (sampled_result) return CircleLift{Kind::sampled, 0, std::move(knots)};
  return CircleLift{Kind::piecewise_linear, 0, simplify(std::move(knots))};
}

CircleLift CircleLift::power(std::int64_t k) const {
  CircleLift base = k < 0 ? inverse() : *this;
  std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
  CircleLift result = kind_ == Kind::sampled ? compose(inverse()) : rotation(0);
  while (e > 0) {
    if (e & 1) result = base.compose(result);
    e >>= 1;
    if (e) base = base.compose(base);
  }
  return result;
}

bool CircleLift::is_rotation() const {
  if (kind_ == Kind::rotation) return true;
  if (kind_ == Kind::sampled) return false;
  return simplify(knots_).size() == 1 && slope(knots_.front(), Knot{knots_.front().first + 1, knots_.front().second + 1}) == 1 &&
         std::all_of(knots_.begin(), knots_.end(), [&](const Knot& k) { return k.second - k.first == knots_.front().second - knots_.front().first; });
}

std::string CircleLift::describe() const {
  if (kind_ == Kind::rotation) return "rotation(" + to_string(angle_) + ")";
  std::string s = kind_ == Kind::sampled ? "sampled[" : "pl[";
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i) s += ", ";
    s += to_string(knots_[i].first) + "->" + to_string(knots_[i].second);
  }
  return s + "]";
}

bool same_lift(const CircleLift& f, const CircleLift& g) {
  using K = CircleLift::Kind;
  if (f.kind() == K::sampled || g.kind() == K::sampled) {
    const auto& table = f.kind() == K::sampled ? f.knots() : g.knots();
    try {
      for (const auto& k : table)
        if (f(k.first) != g(k.first)) return false;
    } catch (const std::domain_error&) {
      return false;
    }
    return true;
  }
  std::vector<Rational> pts{Rational{0}};
  for (const auto& k : f.knots()) pts.push_back(k.first);
  for (const auto& k : g.knots()) pts.push_back(k.first);
  return std::all_of(pts.begin(), pts.end(), [&](const Rational& x) { return f(x) == g(x); });
}

namespace {

TauResult iterate_tau(const CircleLift& f, std::size_t n) {
  if (n == 0) throw std::domain_error("translation_number: n must be >= 1");
  const Rational x0 = f.kind() == CircleLift::Kind::sampled ? f.knots().front().first : Rational{0};
  Rational x = x0;
  for (std::size_t i = 0; i < n; ++i) x = f(x);
  TauResult r;
  const Rational nn = from_int64(static_cast<std::int64_t>(n));
  r.tau = (x - x0) / nn;
  r.error_bound = 1 / nn;
  r.method = "iterate(n=" + std::to_string(n) + ")";
  return r;
}

std::optional<TauResult> periodic_orbit_tau(const CircleLift& f, const Rational& start, std::size_t bound) {
  std::map<Rational, std::pair<std::size_t, Rational>> seen;
  Rational x = start;
  for (std::size_t k = 0; k <= bound; ++k) {
    const Rational t = frac(x);
    if (auto it = seen.find(t); it != seen.end()) {
      TauResult r;
      const std::size_t q = k - it->second.first;
      r.tau = (x - it->second.second) / from_int64(static_cast<std::int64_t>(q));
      r.exact = true;
      r.method = "periodic-orbit(q=" + std::to_string(q) + ")";
      return r;
    }
    seen.emplace(t, std::pair{k, x});
    x = f(x);
  }
  return std::nullopt;
}

// f^q(x) - x is continuous and periodic, linear between the knots of f^q, so
// its range is [min, max] over the knots. An integer p in that range means
// f^q(x) = x + p for some x, hence tau = p/q.
std::optional<TauResult> periodic_point_tau(const CircleLift& f, std::size_t max_period) {
  CircleLift g = f;
  for (std::size_t q = 1; q <= max_period; ++q) {
    std::optional<Rational> lo, hi;
    for (const auto& k : g.knots()) {
      const Rational d = k.second - k.first;
      if (!lo || d < *lo) lo = d;
      if (!hi || d > *hi) hi = d;
    }
    Integer p = floor(*lo);
    if (Rational{p} < *lo) p += 1;
    if (Rational{p} <= *hi) {
      TauResult r;
      r.tau = Rational{p} / from_int64(static_cast<std::int64_t>(q));
      r.tau.canonicalize();
      r.exact = true;
      r.method = "periodic-point(q=" + std::to_string(q) + ")";
      return r;
    }
    g = f.compose(g);
  }
  return std::nullopt;
}

}  // namespace

TauResult translation_number(const CircleLift& f, const TauOptions& opts) {
  if (opts.mode == TauOptions::Mode::iterative) return iterate_tau(f, opts.n);
  if (f.kind() == CircleLift::Kind::rotation) {
    TauResult r;
    r.tau = f.angle();
    r.exact = true;
    r.method = "rotation";
    return r;
  }
  if (f.is_rotation()) {
    TauResult r;
    r.tau = f.knots().front().second - f.knots().front().first;
    r.exact = true;
    r.method = "rotation";
    return r;
  }
  if (f.kind() == CircleLift::Kind::sampled) {
    for (const auto& k : f.knots())
      if (auto r = periodic_orbit_tau(f, k.first, opts.cycle_bound)) return *r;
  } else if (auto r = periodic_point_tau(f, opts.max_period)) {
    return *r;
  }
  TauResult r = iterate_tau(f, opts.n);
  r.fell_back = true;
  r.method = "no periodic orbit within the budget; " + r.method;
  return r;
}

Verdict tau_homogeneity_check(const CircleLift& f, std::int64_t k, const TauOptions& opts) {
  if (k == 0) throw std::domain_error("tau_homogeneity_check: k must be nonzero");
  const TauResult base = translation_number(f, opts);
  const TauResult pow = translation_number(f.power(k), opts);
  const Rational kk = from_int64(k);
  Verdict v;
  v.observed = abs(pow.tau - kk * base.tau);
  v.allowed = pow.error_bound + abs(kk) * base.error_bound;
  v.holds = v.observed <= v.allowed;
  return v;
}

Density::Density(Kind kind, std::vector<Knot> knots) : kind_(kind), knots_(std::move(knots)) {
  if (knots_.empty() || knots_.front().first != 0) throw std::invalid_argument("density: first knot must be at 0");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (knots_[i].first >= 1) throw std::invalid_argument("density: knot outside [0,1)");
    if (i > 0 && !(knots_[i - 1].first < knots_[i].first)) throw std::invalid_argument("density: knots must increase");
    if (knots_[i].second < 0) throw std::domain_error("density: negative value " + to_string(knots_[i].second));
  }
}

Density Density::step(std::vector<Knot> pieces) { return Density{Kind::step, std::move(pieces)}; }
Density Density::piecewise_linear(std::vector<Knot> knots) { return Density{Kind::piecewise_linear, std::move(knots)}; }

Rational Density::integral_to(const Rational& t) const {
  if (t < 0 || t > 1) throw std::domain_error("density integral: t outside [0,1]");
  Rational sum = 0;
  const std::size_t m = knots_.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Rational a = knots_[i].first;
    const Rational b = i + 1 < m ? knots_[i + 1].first : Rational{1};
    if (t <= a) break;
    const Rational end = t < b ? t : b;
    if (kind_ == Kind::step) {
      sum += knots_[i].second * (end - a);
    } else {
      const Rational va = knots_[i].second;
      const Rational vb = i + 1 < m ? knots_[i + 1].second : knots_[0].second;
      const Rational v_end = va + (vb - va) * (end - a) / (b - a);
      sum += (va + v_end) * (end - a) / 2;
    }
  }
  return sum;
}

std::string Density::describe() const {
  std::string s = kind_ == Kind::step ? "step[" : "pl[";
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i) s += ", ";
    s += to_string(knots_[i].first) + ":" + to_string(knots_[i].second);
  }
  return s + "]";
}

Rational path_integral_h(const Density& density, const Rational& x) {
  const Integer n = floor(x);
  return Rational{n} * density.total() + density.integral_to(x - n);
}

Triple<Rational> lattice_triple(std::int64_t denominator, Rational offset) {
  if (denominator <= 0) throw std::domain_error("lattice_triple: denominator must be positive");
  const Rational step = make_rational(1, denominator);
  if (offset < 0 || offset >= step) throw std::domain_error("lattice_triple: offset must lie in [0, 1/N)");
  Triple<Rational> t;
  t.kind = "lattice(1/" + std::to_string(denominator) + (offset == 0 ? "" : " + " + to_string(offset)) + ")";
  t.h = [](const Rational& x) { return x; };
  t.domain_of = [](const Rational& x) { return to_int64(floor(x)); };
  t.shift = [](std::int64_t a, const Rational& x) { return std::optional<Rational>{x + from_int64(a)}; };
  t.base_domain = [denominator, step, offset](std::size_t) {
    std::vector<Rational> pts;
    for (std::int64_t j = 0; j < denominator; ++j) pts.push_back(offset + from_int64(j) * step);
    return pts;
  };
  t.M0 = 0;
  return t;
}

Triple<Rational> density_triple(Density density) {
  Triple<Rational> t;
  t.kind = "path-integral(" + density.describe() + ")";
  t.h = [density](const Rational& x) { return path_integral_h(density, x); };
  t.domain_of = [](const Rational& x) { return to_int64(floor(x)); };
  t.shift = [](std::int64_t a, const Rational& x) { return std::optional<Rational>{x + from_int64(a)}; };
  t.base_domain = [](std::size_t truncation) {
    const auto n = static_cast<std::int64_t>(std::max<std::size_t>(truncation, 1));
    std::vector<Rational> pts;
    for (std::int64_t j = 0; j < n; ++j) pts.push_back(make_rational(j, n));
    return pts;
  };
  t.M0 = 0;
  return t;
}

GAction<Rational> lift_action(std::vector<CircleLift> lifts, std::vector<std::string> names) {
  if (lifts.empty()) throw std::invalid_argument("lift_action: no lifts");
  GAction<Rational> a;
  a.group = make_presentation(Presentation::free(static_cast<int>(lifts.size()), std::move(names)));
  a.label = "lifts(";
  for (std::size_t i = 0; i < lifts.size(); ++i) a.label += (i ? "," : "") + lifts[i].describe();
  a.label += ")";
  std::vector<CircleLift> inverses;
  for (const auto& f : lifts) inverses.push_back(f.inverse());
  a.act = [lifts = std::move(lifts), inverses = std::move(inverses)](const Word& g, const Rational& x) {
    Rational y = x;
    auto ls = g.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
      const auto& f = it->exp > 0 ? lifts[static_cast<std::size_t>(it->gen)] : inverses[static_cast<std::size_t>(it->gen)];
      for (std::int64_t i = 0; i < (it->exp > 0 ? it->exp : -it->exp); ++i) y = f(y);
    }
    return std::optional<Rational>{y};
  };
  a.commutation = CommutationMode::exact();
  return a;
}

MonotoneReport check_monotone_conditions(const MonotoneTripleAction& act, const std::vector<Rational>& samples,
                                         const std::vector<Word>& g_set, const std::vector<std::int64_t>& alphas) {
  if (samples.empty()) throw std::domain_error("check_monotone_conditions: empty sample");
  MonotoneReport rep;
  const auto& t = act.triple;
  auto fail = [&](AxiomCheck& c, std::string witness) {
    if (!c.passed) return;
    c.passed = false;
    c.witness = std::move(witness);
    rep.passed = false;
  };
  for (const auto& g : g_set) {
    std::vector<Rational> hx, hgx;
    for (const auto& x : samples) {
      auto gx = act.action.act(g, x);
      if (!gx) throw OutOfTruncation("check_monotone_conditions: image outside X");
      hx.push_back(t.h(x));
      hgx.push_back(t.h(*gx));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t j = 0; j < samples.size(); ++j) {
        const std::string where = "g=" + format_word(g) + " x=" + to_string(samples[i]) + " y=" + to_string(samples[j]);
        if ((hgx[i] >= hgx[j]) != (hx[i] >= hx[j])) fail(rep.order, where);
        if (hx[i] == hx[j] && hgx[i] != hgx[j]) fail(rep.level_sets, where);
      }
    }
  }
  for (const auto& x : samples) {
    for (std::int64_t a : alphas) {
      auto y = t.shift(a, x);
      if (!y) continue;
      const Rational b = t.h(*y) - t.h(x) - from_int64(t.rho(a));
      if (b != 0) fail(rep.zero_cocycle, "x=" + to_string(x) + " alpha=" + std::to_string(a) + " b=" + to_string(b));
    }
  }
  return rep;
}

DisplacementCertificate width_theorem_check(const MonotoneTripleAction& act, const Word& g, std::size_t truncation) {
  return displacement_certificate(act.action, act.triple, g, truncation, Rational{1});
}

CircleLift extend_to_line(const MonotoneTripleAction& act, const Word& g, std::size_t truncation) {
  const auto& t = act.triple;
  std::vector<Knot> graph;
  for (const auto& x : t.base_domain(truncation)) {
    auto gx = act.action.act(g, x);
    if (!gx) throw OutOfTruncation("extend_to_line: image outside X");
    graph.emplace_back(t.h(x), t.h(*gx));
  }
  std::sort(graph.begin(), graph.end());
  // Points on one level set must share their image.
  std::vector<Knot> knots;
  for (const auto& k : graph) {
    if (!knots.empty() && knots.back().first == k.first) {
      if (knots.back().second != k.second) throw std::domain_error("extend_to_line: level set not preserved");
      continue;
    }
    knots.push_back(k);
  }
  try {
    return CircleLift::piecewise_linear(std::move(knots));
  } catch (const std::invalid_argument& e) {
    throw std::domain_error(std::string{"extend_to_line: induced map is not monotone: "} + e.what());
  }
}

}  // namespace qmlab
