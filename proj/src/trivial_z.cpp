#include "qmlab/triple.hpp"

namespace qmlab {

Triple<std::int64_t> trivial_z_triple() {
  Triple<std::int64_t> t;
  t.kind = "trivial-z";
  t.h = [](const std::int64_t& n) { return from_int64(n); };
  t.domain_of = [](const std::int64_t& n) { return n; };
  t.shift = [](std::int64_t alpha, const std::int64_t& n) { return std::optional<std::int64_t>{n + alpha}; };
  t.base_domain = [](std::size_t) { return std::vector<std::int64_t>{0}; };
  t.M0 = 0;
  return t;
}

GAction<std::int64_t> translation_action() {
  GAction<std::int64_t> a;
  a.label = "translation";
  a.group = make_presentation(Presentation::free(1, {"t"}));
  a.act = [](const Word& g, const std::int64_t& n) {
    std::int64_t s = n;
    for (const auto& l : g.letters()) s += l.exp;
    return std::optional<std::int64_t>{s};
  };
  a.commutation = CommutationMode::exact();
  return a;
}

}  // namespace qmlab
