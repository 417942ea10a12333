#include "qmlab/config.hpp"

#include "qmlab/psl2z.hpp"

namespace qmlab::config {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing \"" + key + "\"");
  return *it;
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) throw ConfigError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::int64_t require_positive(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) throw ConfigError(where + " must be a positive integer");
  return v.get<std::int64_t>();
}

std::size_t optional_size(const Json& j, const char* key, std::size_t fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return static_cast<std::size_t>(require_positive(*it, where + "." + key));
}

std::vector<std::string> optional_names(const Json& j, const std::string& where) {
  std::vector<std::string> names;
  auto it = j.find("names");
  if (it == j.end()) return names;
  if (!it->is_array()) throw ConfigError(where + ".names must be an array of strings");
  for (const auto& n : *it) {
    if (!n.is_string()) throw ConfigError(where + ".names must be an array of strings");
    names.push_back(n.get<std::string>());
  }
  return names;
}

std::vector<Knot> parse_knots(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty array of pairs");
  std::vector<Knot> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& k = j[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!k.is_array() || k.size() != 2) throw ConfigError(at + " must be a pair");
    out.emplace_back(parse_rational(k[0], at), parse_rational(k[1], at));
  }
  return out;
}

Word parse_word_field(const PresentationRef& p, const std::string& text, const std::string& where) {
  try {
    return parse_word(p, text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

// Rethrows descriptor-level invalid_argument as ConfigError.
template <class F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

Rational parse_rational(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return from_int64(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return qmlab::parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument&) {
      throw ConfigError(where + ": \"" + j.get<std::string>() + "\" is not a rational");
    }
  }
  throw ConfigError(where + ": rationals are integers or \"p/q\" strings");
}

PresentationRef parse_group(const Json& j) {
  const std::string kind = require_string(j, "kind", "group");
  return guarded("group", [&] {
    if (kind == "free") {
      const auto rank = require_positive(require(j, "rank", "group"), "group.rank");
      return make_presentation(Presentation::free(static_cast<int>(rank), optional_names(j, "group")));
    }
    if (kind == "cyclic-free-product") {
      const Json& orders = require(j, "orders", "group");
      if (!orders.is_array() || orders.empty()) throw ConfigError("group.orders must be a nonempty array");
      std::vector<int> os;
      for (const auto& o : orders) {
        if (!o.is_number_integer() || o.get<int>() < 0) throw ConfigError("group.orders entries must be >= 0");
        os.push_back(o.get<int>());
      }
      auto names = optional_names(j, "group");
      if (os == std::vector<int>{2, 3} && names.empty()) return psl2z_presentation();
      return make_presentation(Presentation::cyclic_free_product(std::move(os), std::move(names)));
    }
    if (kind == "psl2z") return psl2z_presentation();
    throw ConfigError("group.kind \"" + kind + "\" is not one of free, cyclic-free-product, psl2z");
  });
}

Quasimorphism parse_qm(const Json& j, const PresentationRef& group) {
  const std::string kind = require_string(j, "kind", "qm");
  Quasimorphism mu = guarded("qm", [&] {
    if (kind == "counting") {
      const Word pattern = parse_word_field(group, require_string(j, "pattern", "qm"), "qm.pattern");
      if (!group->is_free()) throw ConfigError("qm: counting quasimorphisms need a free group");
      if (pattern.is_identity()) throw ConfigError("qm.pattern must be nonempty");
      return counting_qm(pattern, optional_size(j, "certify_length", 6, "qm"));
    }
    if (kind == "hom") {
      const Json& w = require(j, "weights", "qm");
      if (!w.is_object()) throw ConfigError("qm.weights must map generator names to rationals");
      std::vector<Rational> weights(group->generator_count());
      for (auto it = w.begin(); it != w.end(); ++it) {
        const auto& names = group->names();
        auto pos = std::find(names.begin(), names.end(), it.key());
        if (pos == names.end()) throw ConfigError("qm.weights: unknown generator \"" + it.key() + "\"");
        weights[static_cast<std::size_t>(pos - names.begin())] = parse_rational(it.value(), "qm.weights." + it.key());
      }
      try {
        return homomorphism_qm(group, std::move(weights));
      } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
      }
    }
    if (kind == "rademacher") {
      if (!group->is_psl2z()) throw ConfigError("qm: rademacher needs the group Z/2 * Z/3");
      return rademacher_qm();
    }
    throw ConfigError("qm.kind \"" + kind + "\" is not one of counting, hom, rademacher");
  });
  if (auto it = j.find("scale"); it != j.end()) {
    const Rational s = parse_rational(*it, "qm.scale");
    if (s == 0) throw ConfigError("qm.scale must be nonzero");
    mu = scaled(mu, s);
  }
  return mu;
}

CircleLift parse_lift(const Json& j) {
  const std::string kind = require_string(j, "kind", "lift");
  return guarded("lift", [&] {
    if (kind == "rotation") return CircleLift::rotation(parse_rational(require(j, "angle", "lift"), "lift.angle"));
    if (kind == "pl") {
      const char* key = j.contains("breakpoints") ? "breakpoints" : "knots";
      return CircleLift::piecewise_linear(parse_knots(require(j, key, "lift"), std::string{"lift."} + key));
    }
    if (kind == "sampled") return CircleLift::sampled(parse_knots(require(j, "table", "lift"), "lift.table"));
    throw ConfigError("lift.kind \"" + kind + "\" is not one of rotation, pl, sampled");
  });
}

Density parse_density(const Json& j) {
  const std::string kind = require_string(j, "kind", "density");
  try {
    if (kind == "step") return Density::step(parse_knots(require(j, "pieces", "density"), "density.pieces"));
    if (kind == "pl") return Density::piecewise_linear(parse_knots(require(j, "knots", "density"), "density.knots"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string{"density: "} + e.what());
  }
  throw ConfigError("density.kind \"" + kind + "\" is not one of step, pl");
}

ActionBundle<Word> ladder_bundle(const LadderEmbedding& e) {
  return ActionBundle<Word>{e.triple(), e.action(), e.certified_root_bound(), Word{e.group()}};
}

ParsedAction parse_action(const Json& j) {
  const std::string kind = require_string(j, "kind", "action");
  ParsedAction out{kind, ActionBundle<std::int64_t>{trivial_z_triple(), translation_action(), Rational{0}, 0}, std::nullopt};
  if (kind == "trivial-z") return out;

  if (kind == "ladder" || kind == "psl2z-ladder") {
    const std::size_t max_length = optional_size(j, "max_length", 8, "action");
    const std::size_t root_length = optional_size(j, "root_length", 4, "action");
    LadderEmbedding e = [&] {
      try {
        if (kind == "psl2z-ladder") return build_psl2z_ladder(max_length, root_length);
        const PresentationRef group = parse_group(require(j, "group", "action"));
        const Quasimorphism mu = parse_qm(require(j, "qm", "action"), group);
        const Word g0 = parse_word_field(group, require_string(j, "witness", "action"), "action.witness");
        return build_embedding(group, integerize(mu, g0), max_length, root_length);
      } catch (const std::domain_error& e) {
        throw ConfigError(std::string{"action: "} + e.what());
      }
    }();
    out.bundle = ladder_bundle(e);
    out.ladder = std::move(e);
    return out;
  }

  if (kind == "circle-lift") {
    const Json& lj = require(j, "lifts", "action");
    if (!lj.is_array() || lj.empty()) throw ConfigError("action.lifts must be a nonempty array");
    std::vector<CircleLift> lifts;
    for (const auto& l : lj) lifts.push_back(parse_lift(l));
    auto action = guarded("action", [&] { return lift_action(std::move(lifts), optional_names(j, "action")); });
    Triple<Rational> triple;
    if (auto d = j.find("density"); d != j.end()) {
      triple = density_triple(parse_density(*d));
    } else {
      const auto n = j.contains("lattice") ? require_positive(j["lattice"], "action.lattice") : 1;
      const Rational offset = j.contains("offset") ? parse_rational(j["offset"], "action.offset") : Rational{0};
      try {
        triple = lattice_triple(n, offset);
      } catch (const std::domain_error& e) {
        throw ConfigError(std::string{"action: "} + e.what());
      }
    }
    const Rational a = triple.base_domain(1).front();
    out.bundle = ActionBundle<Rational>{std::move(triple), std::move(action), Rational{1}, a};
    return out;
  }
  throw ConfigError("action.kind \"" + kind + "\" is not one of trivial-z, ladder, psl2z-ladder, circle-lift");
}

}  // namespace qmlab::config
