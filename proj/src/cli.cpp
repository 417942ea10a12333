#include "qmlab/cli.hpp"

#include "qmlab/psl2z.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace qmlab::cli {

using config::ConfigError;
using config::Json;

namespace {

constexpr const char* kCertification = "sample-certified: bounds are checked exactly on the enumerated sample only";

std::string str(const Rational& r) { return to_string(r); }

std::size_t budget(const std::optional<std::size_t>& b, std::size_t fallback) { return b ? *b : fallback; }

const Json& param(const RunConfig& c, const char* key) {
  auto it = c.params.find(key);
  if (it == c.params.end()) throw ConfigError(c.command + ": missing --" + std::string{key});
  return *it;
}

std::string param_string(const RunConfig& c, const char* key) {
  const Json& v = param(c, key);
  if (!v.is_string()) throw ConfigError(c.command + ": --" + std::string{key} + " must be a string");
  return v.get<std::string>();
}

Word param_word(const RunConfig& c, const char* key, const PresentationRef& p) {
  try {
    return parse_word(p, param_string(c, key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(c.command + ": --" + std::string{key} + ": " + e.what());
  }
}

Json budgets_json(std::size_t max_length, std::size_t doublings, std::size_t iters, std::size_t truncation) {
  Json b = Json::object();
  if (max_length) b["max_length"] = max_length;
  if (doublings) b["doublings"] = doublings;
  if (iters) b["iters"] = iters;
  if (truncation) b["truncation"] = truncation;
  return b;
}

Json report_header(const RunConfig& c) {
  Json r = Json::object();
  r["command"] = c.command;
  if (!c.subcommand.empty()) r["subcommand"] = c.subcommand;
  r["certification"] = kCertification;
  return r;
}

std::vector<Word> nontrivial_words(const PresentationRef& p, std::size_t max_length) {
  auto ws = enumerate(p, max_length);
  ws.erase(ws.begin());
  return ws;
}

std::vector<Word> generators_of(const PresentationRef& p) {
  std::vector<Word> gens;
  for (std::size_t i = 0; i < p->generator_count(); ++i) gens.push_back(Word::generator(p, i));
  return gens;
}

// First word (shortlex, length <= 3) whose homogenization is separated from 0.
Word find_witness(const Quasimorphism& mu, const PresentationRef& p, std::size_t doublings) {
  if (!mu.claimed_defect) throw ConfigError("quasimorphism " + mu.label + " has no certified defect");
  for (const auto& w : nontrivial_words(p, 3)) {
    auto h = homogenize(mu, w, doublings, *mu.claimed_defect);
    if (abs(h.value) > h.error_bound) return w;
  }
  throw ConfigError("no witness of length <= 3 with mu^h separated from 0 for " + mu.label);
}

LadderEmbedding embedding_from(const RunConfig& c, const char* qm_key, const char* witness_key) {
  const std::size_t max_length = budget(c.budgets.max_length, 8);
  const std::size_t doublings = budget(c.budgets.doublings, 10);
  if (c.params.contains("action")) {
    auto parsed = config::parse_action(c.params["action"]);
    if (!parsed.ladder) throw ConfigError(c.command + ": action must be a ladder or psl2z-ladder");
    return *parsed.ladder;
  }
  const PresentationRef group = config::parse_group(param(c, "group"));
  const Quasimorphism mu = config::parse_qm(param(c, qm_key), group);
  const Word g0 = c.params.contains(witness_key) ? param_word(c, witness_key, group) : find_witness(mu, group, doublings);
  IntegerizeBudgets ib;
  ib.doublings = doublings;
  try {
    return build_embedding(group, integerize(mu, g0, ib), max_length);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

Json axiom_json(const AxiomCheck& a) {
  Json j = Json::object();
  j["axiom"] = a.axiom;
  j["passed"] = a.passed;
  if (!a.passed) {
    j["witness"] = a.witness;
    j["detail"] = a.detail;
  }
  return j;
}

// ---- commands --------------------------------------------------------------

Json cmd_verify_triple(const RunConfig& c, int& status) {
  const auto parsed = config::parse_action(param(c, "action"));
  const std::size_t truncation = budget(c.budgets.truncation, 3);
  Json r = report_header(c);
  r["action"] = parsed.kind;
  r["budgets"] = budgets_json(0, 0, 0, truncation);
  std::visit(
      [&](const auto& b) {
        const TripleReport rep = verify_triple(b.triple, truncation);
        r["triple"] = b.triple.kind;
        r["M0"] = str(rep.M0);
        r["max_b"] = str(rep.max_b);
        r["max_domain_width"] = str(rep.max_domain_width);
        r["bound"] = "|b| <= M0 = " + str(rep.M0) + "; domain width <= 1+2*M0 = " + str(1 + 2 * rep.M0);
        r["points"] = rep.points;
        r["skipped"] = rep.skipped;
        Json checks = Json::array();
        for (const auto& a : rep.checks) checks.push_back(axiom_json(a));
        r["checks"] = checks;
        r["passed"] = rep.passed;
        status = rep.passed ? kExitOk : kExitViolation;
      },
      parsed.bundle);
  return r;
}

Json cmd_defect(const RunConfig& c, int& status) {
  const PresentationRef group = config::parse_group(param(c, "group"));
  const Quasimorphism mu = config::parse_qm(param(c, "qm"), group);
  const std::size_t max_length = budget(c.budgets.max_length, 4);
  const DefectEstimate est = defect_search(mu, group, max_length);
  Json r = report_header(c);
  r["group"] = group->describe();
  r["qm"] = mu.label;
  r["budgets"] = budgets_json(max_length, 0, 0, 0);
  r["observed_defect"] = str(est.value);
  r["pairs"] = est.pairs;
  if (est.x) r["witness"] = {{"x", format_word(*est.x)}, {"y", format_word(*est.y)}};
  bool passed = true;
  if (mu.claimed_defect) {
    r["claimed_defect"] = str(*mu.claimed_defect);
    passed = est.value <= *mu.claimed_defect;
  } else {
    r["claimed_defect"] = nullptr;
  }
  r["passed"] = passed;
  status = passed ? kExitOk : kExitViolation;
  return r;
}

struct HomogTrace {
  Json json;
  std::vector<std::vector<std::string>> rows;
  bool passed = true;
};

// Doubling trace with the gap bound |s_(k+1) - s_k| <= D / 2^(k+1).
HomogTrace homog_trace(const HomogenizationResult& h, const Rational& D) {
  HomogTrace t;
  Json seq = Json::array();
  Rational n = 1;
  for (std::size_t k = 0; k < h.sequence.size(); ++k) {
    Json row = Json::object();
    row["k"] = k;
    row["value"] = str(h.sequence[k]);
    std::vector<std::string> csv{std::to_string(k), str(h.sequence[k]), "", ""};
    if (k > 0) {
      const Rational gap = abs(h.sequence[k] - h.sequence[k - 1]);
      const Rational allowed = D / n;
      row["gap"] = str(gap);
      row["allowed"] = str(allowed);
      csv[2] = str(gap);
      csv[3] = str(allowed);
      if (gap > allowed) t.passed = false;
    }
    n *= 2;
    seq.push_back(row);
    t.rows.push_back(csv);
  }
  t.json["value"] = str(h.value);
  t.json["error_bound"] = str(h.error_bound);
  t.json["iterations"] = h.iterations;
  t.json["torsion"] = h.torsion;
  t.json["sequence"] = seq;
  return t;
}

Json cmd_homog(const RunConfig& c, int& status, std::vector<std::vector<std::string>>& csv) {
  const PresentationRef group = config::parse_group(param(c, "group"));
  const Quasimorphism mu = config::parse_qm(param(c, "qm"), group);
  const Word g = param_word(c, "word", group);
  const std::size_t doublings = budget(c.budgets.doublings, 10);
  std::optional<Rational> D = mu.claimed_defect;
  if (c.params.contains("defect")) D = config::parse_rational(c.params["defect"], "defect");
  if (!D) throw ConfigError("homog: " + mu.label + " has no certified defect; pass --defect");
  HomogenizationResult h;
  try {
    h = homogenize(mu, g, doublings, *D);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  auto trace = homog_trace(h, *D);
  Json r = report_header(c);
  r["qm"] = mu.label;
  r["word"] = format_word(g);
  r["budgets"] = budgets_json(0, doublings, 0, 0);
  r["defect_bound"] = str(*D);
  r["bound"] = "|mu(g^2n)/2n - mu(g^n)/n| <= D/2n, error <= D/2^doublings = " + str(h.error_bound);
  r.update(trace.json);
  r["passed"] = trace.passed;
  status = trace.passed ? kExitOk : kExitViolation;
  csv.push_back({"k", "value", "gap", "allowed"});
  csv.insert(csv.end(), trace.rows.begin(), trace.rows.end());
  return r;
}

Json cmd_embed(const RunConfig& c, int& status, std::vector<std::vector<std::string>>& csv) {
  const LadderEmbedding e = embedding_from(c, "qm", "witness");
  Json r = report_header(c);
  r["group"] = e.group()->describe();
  r["qm"] = e.qm().base().label;
  r["witness"] = format_word(e.qm().witness());
  r["scale"] = str(e.qm().scale());
  r["budgets"] = budgets_json(e.max_length(), e.qm().witness_homogenization().iterations, 0, 0);
  r["root_length"] = e.root_length();
  r["B"] = str(e.B());
  r["certified_root_bound"] = str(e.certified_root_bound());
  r["passed"] = e.B() <= e.certified_root_bound();
  Json rows = Json::array();
  csv.push_back({"word", "level", "slot"});
  for (std::size_t i = 0; i < e.words().size(); ++i) {
    const auto& p = e.points()[i];
    rows.push_back({{"word", format_word(e.words()[i])}, {"level", p.level}, {"slot", p.slot}});
    csv.push_back({format_word(e.words()[i]), std::to_string(p.level), std::to_string(p.slot)});
  }
  r["table"] = rows;
  status = r["passed"].get<bool>() ? kExitOk : kExitViolation;
  return r;
}

Json cmd_orbit(const RunConfig& c, int& status, std::vector<std::vector<std::string>>& csv) {
  const LadderEmbedding e = embedding_from(c, "qm", "witness");
  const Word g = param_word(c, c.params.contains("g") ? "g" : "word", e.group());
  const std::size_t iters = budget(c.budgets.iters, 64);
  const auto levels = e.orbit_levels(g, iters);
  Json r = report_header(c);
  r["g"] = format_word(g);
  r["budgets"] = budgets_json(e.max_length(), 0, iters, 0);
  r["B"] = str(e.B());
  r["slope"] = str(from_int64(levels.back()) / from_int64(static_cast<std::int64_t>(iters)));
  r["levels"] = levels;
  r["passed"] = true;
  csv.push_back({"n", "level"});
  for (std::size_t n = 0; n < levels.size(); ++n) csv.push_back({std::to_string(n), std::to_string(levels[n])});
  status = kExitOk;
  return r;
}

Json cmd_equiv(const RunConfig& c, int& status) {
  const LadderEmbedding e1 = embedding_from(c, "qm1", "witness1");
  const LadderEmbedding e2 = embedding_from(c, "qm2", "witness2");
  const std::size_t iters = budget(c.budgets.iters, 200);
  std::vector<Word> sample;
  if (c.params.contains("g_sample")) {
    const Json& gs = c.params["g_sample"];
    if (!gs.is_array()) throw ConfigError("equiv: g_sample must be an array of words");
    for (const auto& w : gs) {
      if (!w.is_string()) throw ConfigError("equiv: g_sample must be an array of words");
      try {
        sample.push_back(parse_word(e1.group(), w.get<std::string>()));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string{"equiv: "} + ex.what());
      }
    }
  } else {
    sample = nontrivial_words(e1.group(), 2);
  }
  const std::int64_t threshold = c.params.value("threshold", std::int64_t{10});
  const auto v = equivalence_test(e1, e2, sample, iters, threshold);
  Json r = report_header(c);
  r["qm1"] = e1.qm().base().label;
  r["qm2"] = e2.qm().base().label;
  r["budgets"] = budgets_json(e1.max_length(), 0, iters, 0);
  r["threshold"] = threshold;
  r["verdict"] = to_string(v.kind);
  r["max_delta"] = v.max_delta;
  if (v.witness_g) r["witness"] = {{"g", format_word(*v.witness_g)}, {"n", v.witness_n}};
  Json trace = Json::array();
  for (const auto& s : v.trace) trace.push_back({{"g", s.g}, {"n", s.n}, {"delta", s.delta}});
  r["trace"] = trace;
  r["passed"] = true;
  status = kExitOk;
  return r;
}

Json cmd_rotnum(const RunConfig& c, int& status) {
  const CircleLift f = config::parse_lift(param(c, c.params.contains("map") ? "map" : "lift"));
  TauOptions opts;
  const std::string mode = c.params.value("mode", std::string{"exact"});
  if (mode == "iter" || mode == "iterative") {
    opts.mode = TauOptions::Mode::iterative;
  } else if (mode != "exact") {
    throw ConfigError("rotnum: --mode must be exact or iter");
  }
  opts.n = budget(c.budgets.iters, 1024);
  const TauResult t = translation_number(f, opts);
  Json r = report_header(c);
  r["map"] = f.describe();
  r["mode"] = opts.mode == TauOptions::Mode::exact ? "exact" : "iter";
  r["budgets"] = budgets_json(0, 0, opts.n, 0);
  r["tau"] = str(t.tau);
  r["error_bound"] = str(t.error_bound);
  r["exact"] = t.exact;
  r["fell_back"] = t.fell_back;
  r["method"] = t.method;
  bool passed = true;
  if (c.params.contains("power")) {
    const Json& k = c.params["power"];
    if (!k.is_number_integer() || k.get<std::int64_t>() == 0) throw ConfigError("rotnum: --power must be a nonzero integer");
    const Verdict v = tau_homogeneity_check(f, k.get<std::int64_t>(), opts);
    r["homogeneity"] = {{"k", k}, {"observed", str(v.observed)}, {"allowed", str(v.allowed)}, {"holds", v.holds}};
    passed = v.holds;
  }
  r["passed"] = passed;
  status = passed ? kExitOk : kExitViolation;
  return r;
}

Json cmd_psl2z(const RunConfig& c, int& status) {
  const PresentationRef& p = psl2z_presentation();
  Json r = report_header(c);
  bool passed = true;
  if (c.subcommand == "count") {
    const Word w = param_word(c, "word", p);
    r["word"] = param_string(c, "word");
    r["normal_form"] = format_word(w);
    r["count"] = rademacher_counting(w);
  } else if (c.subcommand == "defect") {
    const std::size_t max_length = budget(c.budgets.max_length, 6);
    if (max_length < 2) throw ConfigError("psl2z defect: --max-length must be >= 2");
    const Rational v = rademacher_defect(max_length);
    const Rational claimed = *rademacher_qm().claimed_defect;
    r["budgets"] = budgets_json(max_length, 0, 0, 0);
    r["observed_defect"] = str(v);
    r["claimed_defect"] = str(claimed);
    passed = v <= claimed;
  } else if (c.subcommand == "homog") {
    const std::size_t doublings = budget(c.budgets.doublings, 12);
    IntMatrix m;
    try {
      m = c.params.contains("matrix") ? parse_matrix(param_string(c, "matrix")) : matrix_of(param_word(c, "word", p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string{"psl2z homog: "} + e.what());
    }
    HomogenizationResult h;
    try {
      h = homogenized_rademacher(m, doublings);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string{"psl2z homog: "} + e.what());
    }
    const Rational D = *rademacher_qm().claimed_defect;
    auto trace = homog_trace(h, D);
    r["matrix"] = format_matrix(m.normalized());
    r["word"] = format_word(word_of(m));
    r["budgets"] = budgets_json(0, doublings, 0, 0);
    r["defect_bound"] = str(D);
    r.update(trace.json);
    passed = trace.passed;
  } else {
    throw ConfigError("psl2z: subcommand must be count, defect or homog");
  }
  r["passed"] = passed;
  status = passed ? kExitOk : kExitViolation;
  return r;
}

template <class P>
void pipeline_into(Json& r, const config::ActionBundle<P>& b, std::size_t max_length, std::size_t truncation,
                   bool& passed) {
  PipelineBudgets<P> pb;
  pb.truncation = truncation;
  pb.generators = generators_of(b.action.group);
  pb.C0 = b.C0;
  pb.basepoint = b.basepoint;
  const PipelineResult<P> res = triple_pipeline(b.action, b.triple, pb);

  r["triple"] = b.triple.kind;
  r["action_label"] = b.action.label;
  r["M0"] = str(res.M0);
  r["C0"] = str(res.C0);
  r["beta"] = str(res.beta);
  const Rational bound = 4 * res.M0 + 1 + res.C0 + 2 * res.beta;
  r["bound"] = res.beta == 0 ? "4*M0+1+C0 = " + str(bound) : "4*M0+1+C0+2*beta = " + str(bound);
  r["defect_bound"] = str(bound);
  r["max_displacement_width"] = str(res.max_width);
  Json checks = Json::array();
  for (const auto& a : res.triple.checks) checks.push_back(axiom_json(a));
  r["triple_checks"] = checks;
  r["commutation"] = {{"mode", b.action.commutation.kind == CommutationMode::Kind::exact ? "exact" : "almost"},
                      {"observed", str(res.commutation.observed)},
                      {"passed", res.commutation.passed}};
  r["hypotheses_hold"] = res.ok;
  if (!res.ok) {
    r["failure"] = res.failure;
    passed = false;
    return;
  }

  const auto words = enumerate(b.action.group, max_length);
  std::vector<P> points;
  for (const auto& w : words)
    if (auto x = b.action.act(w, b.basepoint)) points.push_back(*x);
  const auto rc = check_root_condition(b.action, b.triple, points, words);
  r["observed_B"] = str(rc.observed_B);
  if (rc.g)
    r["root_witness"] = {{"g", format_word(*rc.g)}, {"x", describe(*rc.x)}, {"y", describe(*rc.y)}};
  r["root_pairs"] = rc.evaluated;
  Json mu = Json::object();
  for (const auto& g : pb.generators) mu[format_word(g)] = str((*res.mu)(g));
  r["mu"] = mu;
  passed = rc.observed_B <= bound;
}

Json cmd_pipeline(const RunConfig& c, int& status) {
  const auto parsed = config::parse_action(param(c, "action"));
  const std::size_t max_length = budget(c.budgets.max_length, 4);
  const std::size_t truncation = budget(c.budgets.truncation, 3);
  Json r = report_header(c);
  r["action"] = parsed.kind;
  r["budgets"] = budgets_json(max_length, 0, 0, truncation);
  bool passed = true;
  std::visit([&](const auto& b) { pipeline_into(r, b, max_length, truncation, passed); }, parsed.bundle);
  r["passed"] = passed;
  status = passed ? kExitOk : kExitViolation;
  return r;
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      const bool quote = row[i].find_first_of(",\"") != std::string::npos;
      if (quote) {
        os << '"';
        for (char ch : row[i]) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      } else {
        os << row[i];
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> cmds{"verify-triple", "defect", "homog", "embed", "orbit",
                                             "equiv",         "rotnum", "psl2z", "pipeline"};
  return cmds;
}

RunConfig parse_run_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (key == "command" || key == "subcommand") {
      if (!v.is_string()) throw ConfigError("config: \"" + key + "\" must be a string");
      (key == "command" ? c.command : c.subcommand) = v.get<std::string>();
    } else if (key == "budgets") {
      if (!v.is_object()) throw ConfigError("config: budgets must be an object");
      for (auto b = v.begin(); b != v.end(); ++b) {
        if (!b.value().is_number_integer() || b.value().get<std::int64_t>() <= 0)
          throw ConfigError("config: budgets." + b.key() + " must be a positive integer");
        const auto n = b.value().get<std::size_t>();
        if (b.key() == "max_length") c.budgets.max_length = n;
        else if (b.key() == "doublings") c.budgets.doublings = n;
        else if (b.key() == "iters") c.budgets.iters = n;
        else if (b.key() == "truncation") c.budgets.truncation = n;
        else throw ConfigError("config: unknown budget \"" + b.key() + "\"");
      }
    } else if (key == "output") {
      if (!v.is_object()) throw ConfigError("config: output must be an object");
      if (v.contains("path")) c.output_path = v["path"].get<std::string>();
      if (v.contains("format")) {
        const auto f = v["format"].get<std::string>();
        if (f != "json" && f != "csv") throw ConfigError("config: output.format must be json or csv");
        c.format = f == "csv" ? Format::csv : Format::json;
      }
    } else {
      c.params[key] = v;
    }
  }
  return c;
}

RunConfig merge(RunConfig base, const RunConfig& o) {
  if (!o.command.empty()) base.command = o.command;
  if (!o.subcommand.empty()) base.subcommand = o.subcommand;
  for (auto it = o.params.begin(); it != o.params.end(); ++it) base.params[it.key()] = it.value();
  if (o.budgets.max_length) base.budgets.max_length = o.budgets.max_length;
  if (o.budgets.doublings) base.budgets.doublings = o.budgets.doublings;
  if (o.budgets.iters) base.budgets.iters = o.budgets.iters;
  if (o.budgets.truncation) base.budgets.truncation = o.budgets.truncation;
  if (!o.output_path.empty()) base.output_path = o.output_path;
  if (o.format) base.format = o.format;
  return base;
}

std::string render(const RunConfig& c, int& status) {
  std::vector<std::vector<std::string>> csv;
  Json r;
  try {
    if (c.command == "verify-triple") r = cmd_verify_triple(c, status);
    else if (c.command == "defect") r = cmd_defect(c, status);
    else if (c.command == "homog") r = cmd_homog(c, status, csv);
    else if (c.command == "embed") r = cmd_embed(c, status, csv);
    else if (c.command == "orbit") r = cmd_orbit(c, status, csv);
    else if (c.command == "equiv") r = cmd_equiv(c, status);
    else if (c.command == "rotnum") r = cmd_rotnum(c, status);
    else if (c.command == "psl2z") r = cmd_psl2z(c, status);
    else if (c.command == "pipeline") r = cmd_pipeline(c, status);
    else throw ConfigError("unknown command \"" + c.command + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string{"config: "} + e.what());
  }

  // Tables default to CSV; verdicts are JSON only.
  const bool tabular = !csv.empty();
  const Format f = c.format ? *c.format : (c.command == "embed" || c.command == "orbit" ? Format::csv : Format::json);
  if (f == Format::csv) {
    if (!tabular) throw ConfigError(c.command + ": --format csv is only available for tabular output");
    return csv_text(csv);
  }
  return r.dump(2) + "\n";
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::string text;
  int status = kExitOk;
  try {
    text = render(c, status);
  } catch (const std::invalid_argument& e) {
    err << "qmlab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qmlab: " << c.command << " failed: " << e.what() << '\n';
    return kExitViolation;
  }
  if (c.output_path.empty()) {
    out << text;
  } else {
    std::ofstream f{c.output_path, std::ios::binary};
    if (!f) {
      err << "qmlab: cannot write " << c.output_path << '\n';
      return kExitUsage;
    }
    f << text;
  }
  if (status != kExitOk) err << "qmlab: " << c.command << ": a certified bound was violated (see report)\n";
  return status;
}

}  // namespace qmlab::cli
