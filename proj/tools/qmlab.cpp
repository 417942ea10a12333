#include "qmlab/cli.hpp"
#include "qmlab/kernels.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using qmlab::config::Json;

// Descriptor flags take inline JSON, a path to a JSON file, or a bare kind
// name ("trivial-z" is {"kind":"trivial-z"}).
Json load_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  std::string body = text;
  if (first == std::string::npos || (text[first] != '{' && text[first] != '[')) {
    std::ifstream f{text};
    if (!f) {
      const bool bare = !text.empty() && text.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-") == std::string::npos;
      if (bare) return Json{{"kind", text}};
      throw qmlab::config::ConfigError("cannot read " + text);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    body = ss.str();
  }
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw qmlab::config::ConfigError("malformed JSON in " + (body == text ? std::string{"argument"} : text) + ": " +
                                     e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  qmlab::kernels::apply_thread_limit_from_env();

  CLI::App app{"qmlab: quasimorphisms from group actions, ladders and translation numbers"};
  // The command may come from the config file alone: qmlab --config run.json
  app.require_subcommand(0, 1);

  std::string config_path, output_path, format;
  std::optional<std::size_t> max_length, doublings, iters, truncation;
  std::map<std::string, std::string> json_flags, string_flags;
  std::optional<std::int64_t> power, threshold;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--output", output_path, "report path (default: stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--max-length", max_length, "word length budget")->check(CLI::PositiveNumber);
    sub->add_option("--doublings", doublings, "homogenization doublings")->check(CLI::PositiveNumber);
    sub->add_option("--iters,--n", iters, "iteration budget")->check(CLI::PositiveNumber);
    sub->add_option("--truncation", truncation, "fundamental-domain truncation")->check(CLI::PositiveNumber);
  };
  auto json_flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    sub->add_option_function<std::string>("--" + name, [&json_flags, name](const std::string& v) { json_flags[name] = v; },
                                          help + " (inline JSON or file)");
  };
  auto string_flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    sub->add_option_function<std::string>("--" + name, [&string_flags, name](const std::string& v) { string_flags[name] = v; },
                                          help);
  };

  app.add_option("--config", config_path, "JSON run configuration naming the command");

  std::string psl2z_sub;
  for (const auto& name : qmlab::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    common(sub);
    if (name == "verify-triple" || name == "pipeline") json_flag(sub, "action", "action descriptor");
    if (name == "defect" || name == "homog" || name == "embed" || name == "orbit" || name == "equiv")
      json_flag(sub, "group", "group descriptor");
    if (name == "defect" || name == "homog" || name == "embed" || name == "orbit") json_flag(sub, "qm", "quasimorphism descriptor");
    if (name == "embed" || name == "orbit" || name == "equiv") json_flag(sub, "action", "ladder action descriptor");
    if (name == "embed" || name == "orbit") string_flag(sub, "witness", "word g0 with mu^h(g0) != 0");
    if (name == "homog") {
      string_flag(sub, "word", "group element");
      string_flag(sub, "defect", "defect bound override");
    }
    if (name == "orbit") string_flag(sub, "g", "group element");
    if (name == "equiv") {
      json_flag(sub, "qm1", "first quasimorphism");
      json_flag(sub, "qm2", "second quasimorphism");
      string_flag(sub, "witness1", "witness for qm1");
      string_flag(sub, "witness2", "witness for qm2");
      sub->add_option("--threshold", threshold, "level divergence proving inequivalence");
    }
    if (name == "rotnum") {
      json_flag(sub, "map", "lift descriptor");
      string_flag(sub, "mode", "exact or iter");
      sub->add_option("--power", power, "also check tau(f^k) = k tau(f)");
    }
    if (name == "psl2z") {
      sub->add_option("subcommand", psl2z_sub, "count, defect or homog")->required()->check(
          CLI::IsMember({"count", "defect", "homog"}));
      string_flag(sub, "word", "element of Z/2 * Z/3");
      string_flag(sub, "matrix", "[[a,b],[c,d]] with determinant 1");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qmlab::cli::kExitUsage;
  }

  if (app.get_subcommands().empty() && config_path.empty()) {
    std::cerr << app.help();
    return qmlab::cli::kExitUsage;
  }

  qmlab::cli::RunConfig flags;
  try {
    if (!app.get_subcommands().empty()) flags.command = app.get_subcommands().front()->get_name();
    flags.subcommand = psl2z_sub;
    for (const auto& [k, v] : json_flags) flags.params[k] = load_json(v);
    for (const auto& [k, v] : string_flags) flags.params[k] = v;
    if (power) flags.params["power"] = *power;
    if (threshold) flags.params["threshold"] = *threshold;
    flags.budgets = {max_length, doublings, iters, truncation};
    flags.output_path = output_path;
    if (!format.empty()) flags.format = format == "csv" ? qmlab::cli::Format::csv : qmlab::cli::Format::json;

    qmlab::cli::RunConfig cfg;
    if (!config_path.empty()) cfg = qmlab::cli::parse_run_config(load_json(config_path));
    cfg = qmlab::cli::merge(std::move(cfg), flags);
    return qmlab::cli::run(cfg, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "qmlab: " << e.what() << '\n';
    return qmlab::cli::kExitUsage;
  }
}
