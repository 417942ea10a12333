#pragma once

// JSON descriptors for groups, quasimorphisms, lifts, densities and actions.
// Every parser throws ConfigError before any computation starts.

#include "qmlab/circle.hpp"
#include "qmlab/ladder.hpp"
#include "qmlab/qmcore.hpp"
#include "qmlab/triple.hpp"
#include "qmlab/words.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace qmlab::config {

using Json = nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Accepts "p/q" strings and JSON integers.
Rational parse_rational(const Json& j, const std::string& where);

/// {"kind":"free","rank":2}, {"kind":"cyclic-free-product","orders":[2,3]},
/// {"kind":"psl2z"}; optional "names".
PresentationRef parse_group(const Json& j);

/// {"kind":"counting","pattern":"a b"}, {"kind":"hom","weights":{"a":"1"}},
/// {"kind":"rademacher"}; optional "scale" multiplies the result.
Quasimorphism parse_qm(const Json& j, const PresentationRef& group);

/// {"kind":"rotation","angle":"2/5"}, {"kind":"pl","breakpoints":[["0","1/4"],...]}
/// ("knots" is accepted too),
/// {"kind":"sampled","table":[...]}.
CircleLift parse_lift(const Json& j);

/// {"kind":"step","pieces":[["0","1"]]}, {"kind":"pl","knots":[...]}.
Density parse_density(const Json& j);

template <class P>
struct ActionBundle {
  Triple<P> triple;
  GAction<P> action;
  /// Displacement constant the action is certified against.
  Rational C0;
  P basepoint;
};

using AnyAction = std::variant<ActionBundle<std::int64_t>, ActionBundle<Word>, ActionBundle<Rational>>;

struct ParsedAction {
  std::string kind;
  AnyAction bundle;
  std::optional<LadderEmbedding> ladder;
};

/// {"kind":"trivial-z"},
/// {"kind":"ladder","group":...,"qm":...,"witness":"a","max_length":8,"root_length":4},
/// {"kind":"psl2z-ladder","max_length":8},
/// {"kind":"circle-lift","lifts":[...],"lattice":N,"offset":"0"} or with "density".
ParsedAction parse_action(const Json& j);

/// Ladder bundle for an embedding: C0 = certified root bound, basepoint 1.
ActionBundle<Word> ladder_bundle(const LadderEmbedding& e);

}  // namespace qmlab::config
