#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardy/dirac.hpp"
#include "hardy/errors.hpp"
#include "hardy/verifier.hpp"

#ifndef HARDY_VERSION
#define HARDY_VERSION "unknown"
#endif

namespace hardy::cli {

using nlohmann::ordered_json;

namespace {

// Shortest round-trip decimal, so CSV output is exact and reproducible.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

// JSON has no infinity; emit null and keep the flag fields explicit.
ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

std::vector<int> channel_range(const RunConfig& c) {
  if (c.kmin > c.kmax) throw InputError("--kmin must not exceed --kmax");
  std::vector<int> ks;
  for (int k = c.kmin; k <= c.kmax; ++k)
    if (k != -1) ks.push_back(k);
  if (ks.empty()) throw InputError("channel range contains only k = -1");
  return ks;
}

potentials::PotentialPair make_pair(const RunConfig& c) {
  const auto slot = potentials::parse_v1_slot(c.v1);
  potentials::PotentialPair pair;
  pair.v1 = slot.regular;
  pair.v1_shells = slot.shells;
  pair.v2 = potentials::parse_weight(c.v2);
  pair.c1 = c.c1;
  pair.c2 = c.c2;
  pair.validate();
  return pair;
}

numerics::RadialGrid make_grid(const RunConfig& c) {
  return numerics::RadialGrid::log_uniform(c.rmin, c.rmax, c.grid_n);
}

waves::RadialProfile profile_or_zero(const std::string& text) {
  if (text.empty() || text == "0" || text == "zero") return {};
  return waves::parse_profile(text);
}

ordered_json channel_terms_json(const std::map<int, verifier::ChannelTerms>& per_channel) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, t] : per_channel) {
    out[std::to_string(k)] = {{"lhs", jnum(t.lhs)},       {"grad", jnum(t.grad)},
                              {"mass", jnum(t.mass)},     {"rhs", jnum(t.rhs)},
                              {"a_k", jnum(t.a_k)},       {"rhs_sharp", jnum(t.rhs_sharp)},
                              {"satisfied", t.satisfied}};
  }
  return out;
}

// Field as a list of "k=<k>:<profile>" terms, the --field grammar.
ordered_json field_json(const waves::SpinorField& field) {
  ordered_json out = ordered_json::array();
  for (const auto& [k, f] : field.terms()) out.push_back("k=" + std::to_string(k) + ":" + f.to_string());
  return out;
}

ordered_json report_json(const verifier::InequalityReport& r) {
  return {{"lhs", jnum(r.lhs)},
          {"rhs", jnum(r.rhs)},
          {"ratio", jnum(r.ratio)},
          {"constant", jnum(r.constant)},
          {"tolerance", r.tolerance},
          {"satisfied", r.satisfied},
          {"vacuous", r.vacuous},
          {"lhs_infinite", r.lhs_infinite},
          {"per_channel", channel_terms_json(r.per_channel)}};
}

ordered_json config_json(const RunConfig& c, const std::optional<double>& lambda) {
  ordered_json j = {{"command", c.command}, {"v1", c.v1},     {"v2", c.v2},
                    {"c1", c.c1},           {"c2", c.c2},     {"m", c.m},
                    {"lambda", lambda ? ordered_json(*lambda) : ordered_json(nullptr)},
                    {"gamma", c.gamma},     {"fields", c.fields},
                    {"kmin", c.kmin},       {"kmax", c.kmax}, {"grid_n", c.grid_n},
                    {"rmin", c.rmin},       {"rmax", c.rmax}, {"format", c.format},
                    {"seed", c.seed}};
  if (c.command == "verify") j["gallery"] = c.gallery;
  if (c.command == "extremize") {
    j["family"] = c.family;
    j["restarts"] = c.restarts;
    j["max_evaluations"] = c.max_evaluations;
  }
  if (c.command == "solve" || c.command == "spectrum" || c.command == "experiment") {
    j["degree"] = c.degree;
  }
  if (c.command == "solve") {
    j["f1"] = c.f1;
    j["f2"] = c.f2;
    j["tolerance"] = c.tolerance;
  }
  if (c.command == "spectrum") j["count"] = c.count;
  if (c.command == "experiment") {
    j["experiment"] = c.experiment;
    j["radius"] = c.radius;
    if (c.experiment == "mollified") {
      j["eps"] = c.eps;
    } else {
      j["a_values"] = c.a_values;
      j["nu"] = c.nu;
      j["count"] = c.count;
    }
  }
  return j;
}

struct Emitted {
  ordered_json json;
  std::string csv;  // filled when the command has a table and --format csv
};

Emitted cmd_constants(const RunConfig& c) {
  const auto pair = make_pair(c);
  const auto h = potentials::hardy_constants(pair);
  return {{{"a_plus", jnum(h.a_plus)},
           {"a_minus", jnum(h.a_minus)},
           {"a_tilde_plus", jnum(h.a_tilde_plus)},
           {"a_tilde_minus", jnum(h.a_tilde_minus)},
           {"theorem_constant", jnum(h.theorem_constant())}},
          {}};
}

Emitted cmd_channel_constants(const RunConfig& c) {
  const auto pair = make_pair(c);
  const auto ks = channel_range(c);
  const auto h = potentials::hardy_constants(pair, ks);
  Emitted e;
  ordered_json rows = ordered_json::array();
  std::string csv = "k,a_k\n";
  for (int k : ks) {
    const double a = h.per_channel.at(k);
    rows.push_back({{"k", k}, {"a_k", jnum(a)}});
    csv += std::to_string(k) + "," + num(a) + "\n";
  }
  e.json = {{"a_plus", jnum(h.a_plus)}, {"a_minus", jnum(h.a_minus)}, {"channels", rows}};
  e.csv = csv;
  return e;
}

Emitted cmd_verify(const RunConfig& c, std::optional<double>& lambda, bool& violated) {
  const auto pair = make_pair(c);
  auto constants = potentials::hardy_constants(pair);
  std::vector<waves::SpinorField> fields;
  if (!c.fields.empty()) {
    fields.push_back(waves::parse_field(c.fields));
  } else {
    fields = verifier::random_field_gallery(c.gallery, c.seed);
  }
  const bool corollary = pair.c1 > 0.0 && pair.c2 > 0.0;
  if (corollary) {
    verifier::check_corollary_hypothesis(pair, constants);
    if (!lambda) lambda = verifier::select_lambda(pair.c1, pair.c2, c.m);
  }
  ordered_json rows = ordered_json::array();
  double worst_theorem = 0.0;
  double worst_corollary = 0.0;
  std::string csv = "field,theorem_ratio,theorem_satisfied,corollary_ratio,corollary_satisfied\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto t = verifier::verify_theorem(pair, constants, fields[i], c.gamma);
    ordered_json row = {{"field", field_json(fields[i])}, {"theorem", report_json(t)}};
    worst_theorem = std::max(worst_theorem, t.ratio);
    violated = violated || !t.satisfied;
    std::string cor_ratio = "";
    std::string cor_ok = "";
    if (corollary) {
      const auto r = verifier::verify_corollary(pair, constants, fields[i], c.m, lambda);
      auto j = report_json(r);
      j["m"] = r.m;
      j["lambda"] = r.lambda;
      j["threshold"] = jnum(r.threshold);
      j["norm_equivalence"] = {{"evaluated", r.norm_equivalence.evaluated},
                               {"epsilon", r.norm_equivalence.epsilon},
                               {"lambda", r.norm_equivalence.lambda},
                               {"lhs", jnum(r.norm_equivalence.lhs)},
                               {"rhs", jnum(r.norm_equivalence.rhs)},
                               {"satisfied", r.norm_equivalence.satisfied}};
      row["corollary"] = j;
      worst_corollary = std::max(worst_corollary, r.ratio);
      violated = violated || !r.satisfied;
      cor_ratio = num(r.ratio);
      cor_ok = r.satisfied ? "true" : "false";
    }
    csv += std::to_string(i) + "," + num(t.ratio) + "," + (t.satisfied ? "true" : "false") + "," +
           cor_ratio + "," + cor_ok + "\n";
    rows.push_back(row);
  }
  Emitted e;
  e.json = {{"fields", rows},
            {"worst_theorem_ratio", jnum(worst_theorem)},
            {"worst_corollary_ratio", corollary ? jnum(worst_corollary) : ordered_json(nullptr)},
            {"all_satisfied", !violated}};
  e.csv = csv;
  return e;
}

Emitted cmd_extremize(const RunConfig& c) {
  const auto pair = make_pair(c);
  verifier::ProfileFamily family;
  if (c.family == "gauss") {
    family = verifier::ProfileFamily::gauss_family();
  } else if (c.family == "exp") {
    family = verifier::ProfileFamily::exp_family();
  } else {
    throw InputError("--family must be 'exp' or 'gauss'");
  }
  verifier::ExtremizeOptions options;
  options.restarts = c.restarts;
  options.max_evaluations = c.max_evaluations;
  options.seed = c.seed;
  const auto ks = channel_range(c);
  const auto r = verifier::extremize_ratio(pair, c.gamma, family, ks, options);
  Emitted e;
  e.json = {{"family", family.name},
            {"best_ratio", jnum(r.best_ratio)},
            {"best_channel", r.best_channel},
            {"best_parameters", r.best_parameters},
            {"evaluations", r.evaluations},
            {"history", r.history}};
  std::string csv = "evaluation,best_ratio\n";
  for (std::size_t i = 0; i < r.history.size(); ++i)
    csv += std::to_string(i) + "," + num(r.history[i]) + "\n";
  e.csv = csv;
  return e;
}

Emitted cmd_solve(const RunConfig& c, std::optional<double>& lambda) {
  const auto pair = make_pair(c);
  if (!lambda) lambda = dirac::default_lambda(pair, c.m);
  if (c.kmin != c.kmax) throw InputError("solve works on one channel: pass --kmin = --kmax");
  dirac::DiracChannelProblem problem(pair, c.kmin, c.m, *lambda, make_grid(c), c.degree);
  const auto regime = problem.validate();
  dirac::WeakSolveOptions options;
  options.tolerance = c.tolerance;
  const auto f1 = profile_or_zero(c.f1);
  const auto f2 = profile_or_zero(c.f2);
  const auto r = dirac::weak_solve(problem, f1, f2, options);
  Emitted e;
  e.json = {{"k", c.kmin},
            {"regime", std::string(dirac::to_string(regime))},
            {"residual_upper", r.residual_upper},
            {"residual_lower", r.residual_lower},
            {"relative_residual",
             r.rhs_norm > 0.0 ? (r.residual_upper + r.residual_lower) / r.rhs_norm : 0.0},
            {"h_norm_phi", r.h_norm_phi},
            {"rhs_norm", r.rhs_norm},
            {"refinements", r.refinements},
            {"grid_nodes", r.grid_nodes},
            {"dofs", r.dofs}};
  std::string csv = "r,re_phi,im_phi,re_chi,im_chi\n";
  for (double x : r.problem->grid.nodes()) {
    const auto p = r.phi(x);
    const auto g = r.chi(x);
    csv += num(x) + "," + num(p.real()) + "," + num(p.imag()) + "," + num(g.real()) + "," +
           num(g.imag()) + "\n";
  }
  e.csv = csv;
  return e;
}

Emitted cmd_spectrum(const RunConfig& c, std::optional<double>& lambda) {
  const auto pair = make_pair(c);
  if (!lambda) lambda = dirac::default_lambda(pair, c.m);
  ordered_json rows = ordered_json::array();
  ordered_json warnings = ordered_json::array();
  std::string csv = "k,index,E,error_estimate\n";
  std::string regime;
  for (int k : channel_range(c)) {
    dirac::DiracChannelProblem problem(pair, k, c.m, *lambda, make_grid(c), c.degree);
    regime = dirac::to_string(problem.validate());
    const auto s = dirac::spectrum_in_gap(problem, c.count);
    for (const auto& w : s.warnings) warnings.push_back(w);
    for (const auto& ev : s.eigenvalues) {
      rows.push_back({{"k", ev.k},
                      {"index", ev.index},
                      {"E", ev.value},
                      {"error_estimate", ev.error_estimate}});
      csv += std::to_string(ev.k) + "," + std::to_string(ev.index) + "," + num(ev.value) + "," +
             num(ev.error_estimate) + "\n";
    }
  }
  Emitted e;
  e.json = {{"regime", regime}, {"eigenvalues", rows}, {"warnings", warnings}};
  e.csv = csv;
  return e;
}

Emitted cmd_experiment(const RunConfig& c, std::optional<double>& lambda) {
  Emitted e;
  if (c.experiment == "mollified") {
    const std::vector<std::string> default_field{"k=0:gauss:0,1"};
    const auto field = waves::parse_field(c.fields.empty() ? default_field : c.fields);
    const auto r =
        verifier::mollified_delta_experiment(c.c1, c.c2, c.radius, c.eps, field, c.m, lambda);
    lambda = r.lambda;
    ordered_json rows = ordered_json::array();
    std::string csv = "eps,lhs,bulk,annulus,annulus_bound,mass,rhs,ratio,vacuous\n";
    for (const auto& row : r.rows) {
      rows.push_back({{"eps", row.eps},
                      {"lhs", jnum(row.lhs)},
                      {"bulk", jnum(row.bulk)},
                      {"annulus", jnum(row.annulus)},
                      {"annulus_bound", jnum(row.annulus_bound)},
                      {"mass", jnum(row.mass)},
                      {"rhs", jnum(row.rhs)},
                      {"ratio", jnum(row.ratio)},
                      {"vacuous", row.vacuous}});
      csv += num(row.eps) + "," + num(row.lhs) + "," + num(row.bulk) + "," + num(row.annulus) +
             "," + num(row.annulus_bound) + "," + num(row.mass) + "," + num(row.rhs) + "," +
             num(row.ratio) + "," + (row.vacuous ? "true" : "false") + "\n";
    }
    ordered_json ratios = ordered_json::array();
    for (double x : r.annulus_ratios) ratios.push_back(jnum(x));
    e.json = {{"experiment", "mollified"}, {"rows", rows}, {"annulus_ratios", ratios}};
    e.csv = csv;
  } else if (c.experiment == "shell-spectrum") {
    const auto ks = channel_range(c);
    const auto t = dirac::shell_spectrum_demo(c.a_values, c.radius, c.nu, c.m, ks, make_grid(c),
                                              c.count, c.degree);
    ordered_json rows = ordered_json::array();
    std::string csv = "a,k,index,E,error_estimate,outside_regime\n";
    for (const auto& row : t.rows) {
      rows.push_back({{"a", row.a},
                      {"k", row.k},
                      {"index", row.index},
                      {"E", row.value},
                      {"error_estimate", row.error_estimate},
                      {"outside_regime", row.outside_regime}});
      csv += num(row.a) + "," + std::to_string(row.k) + "," + std::to_string(row.index) + "," +
             num(row.value) + "," + num(row.error_estimate) + "," +
             (row.outside_regime ? "true" : "false") + "\n";
    }
    e.json = {{"experiment", "shell-spectrum"}, {"rows", rows}, {"warnings", t.warnings}};
    e.csv = csv;
  } else {
    throw InputError("--experiment must be 'mollified' or 'shell-spectrum'");
  }
  return e;
}

RunOutput failure(const RunConfig& c, int code, const std::string& kind, const std::string& what) {
  ordered_json j = {{"version", version()},
                    {"config", config_json(c, c.lambda)},
                    {"error", {{"type", kind}, {"message", what}, {"exit_code", code}}}};
  return {code, j.dump(2) + "\n", kind + " error: " + what};
}

}  // namespace

std::string version() { return HARDY_VERSION; }

RunOutput run(const RunConfig& c) {
  std::optional<double> lambda = c.lambda;
  try {
    if (c.format != "json" && c.format != "csv") throw InputError("--format must be json or csv");
    if (!(c.rmin > 0.0 && c.rmax > c.rmin)) throw InputError("need 0 < --rmin < --rmax");
    if (c.grid_n < 5) throw InputError("--grid-n must be at least 5");
    Emitted e;
    bool violated = false;
    if (c.command == "constants") {
      e = cmd_constants(c);
    } else if (c.command == "channel-constants") {
      e = cmd_channel_constants(c);
    } else if (c.command == "verify") {
      e = cmd_verify(c, lambda, violated);
    } else if (c.command == "extremize") {
      e = cmd_extremize(c);
    } else if (c.command == "solve") {
      e = cmd_solve(c, lambda);
    } else if (c.command == "spectrum") {
      e = cmd_spectrum(c, lambda);
    } else if (c.command == "experiment") {
      e = cmd_experiment(c, lambda);
    } else {
      throw InputError("unknown command '" + c.command + "'");
    }
    RunOutput out;
    // A violated inequality can only come from numerical error.
    out.exit_code = violated ? numerical : ok;
    if (violated) out.message = "numerical error: an inequality check failed beyond tolerance";
    if (c.format == "csv" && !e.csv.empty()) {
      out.report = e.csv;
    } else {
      ordered_json j = {{"version", version()}, {"config", config_json(c, lambda)}, {"result", e.json}};
      out.report = j.dump(2) + "\n";
    }
    return out;
  } catch (const HypothesisError& e) {
    return failure(c, hypothesis, "hypothesis", e.what());
  } catch (const NumericalError& e) {
    return failure(c, numerical, "numerical", e.what());
  } catch (const InputError& e) {
    return failure(c, input, "input", e.what());
  } catch (const std::exception& e) {
    return failure(c, numerical, "internal", e.what());
  }
}

namespace {

void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw InputError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Two-weight Hardy constants, Hardy-Dirac inequalities and the Dirac channel solver",
               "hardy"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);

  double lambda = 0.0;
  const auto common = [&](CLI::App* s) {
    s->add_option("--v1", c.v1, "V1 spec, e.g. coulomb:1 or zero + shell:1@2")->capture_default_str();
    s->add_option("--v2", c.v2, "V2 spec, e.g. coulomb:1")->capture_default_str();
    s->add_option("--c1", c.c1, "coupling of V1")->capture_default_str();
    s->add_option("--c2", c.c2, "coupling of V2")->capture_default_str();
    s->add_option("--format", c.format, "json or csv")->capture_default_str();
    s->add_option("--out", c.out, "write the report to PATH (atomically)");
    s->add_option("--seed", c.seed, "random seed")->capture_default_str();
  };
  const auto channels = [&](CLI::App* s) {
    s->add_option("--kmin", c.kmin, "lowest channel")->capture_default_str();
    s->add_option("--kmax", c.kmax, "highest channel")->capture_default_str();
  };
  const auto gap = [&](CLI::App* s) {
    s->add_option("--m", c.m, "mass")->capture_default_str();
    s->add_option("--lambda", lambda, "spectral shift in (-m, m); default chosen from c1, c2, m");
  };
  const auto grid = [&](CLI::App* s) {
    s->add_option("--grid-n", c.grid_n, "radial grid nodes")->capture_default_str();
    s->add_option("--rmin", c.rmin, "inner radius")->capture_default_str();
    s->add_option("--rmax", c.rmax, "outer radius")->capture_default_str();
    s->add_option("--degree", c.degree, "finite element degree")->capture_default_str();
  };

  auto* constants = app.add_subcommand("constants", "A+, A-, tilde constants and max{A+^2, A-^2}");
  common(constants);
  auto* channel_constants = app.add_subcommand("channel-constants", "A_k per channel");
  common(channel_constants);
  channels(channel_constants);
  auto* verify = app.add_subcommand("verify", "check the Hardy-Dirac inequalities on fields");
  common(verify);
  gap(verify);
  verify->add_option("--gamma", c.gamma, "gamma >= 0")->capture_default_str();
  verify->add_option("--field", c.fields, "field term k=<int>:<profile>, repeatable");
  verify->add_option("--gallery", c.gallery, "random fields when no --field is given")
      ->capture_default_str();
  auto* extremize = app.add_subcommand("extremize", "maximize the theorem ratio over a family");
  common(extremize);
  channels(extremize);
  extremize->add_option("--gamma", c.gamma, "gamma >= 0")->capture_default_str();
  extremize->add_option("--family", c.family, "exp or gauss")->capture_default_str();
  extremize->add_option("--restarts", c.restarts)->capture_default_str();
  extremize->add_option("--max-evaluations", c.max_evaluations)->capture_default_str();
  auto* solve = app.add_subcommand("solve", "weak solve of (H + lambda)(phi, chi) = (F1, F2)");
  common(solve);
  gap(solve);
  grid(solve);
  channels(solve);
  solve->add_option("--f1", c.f1, "upper data profile")->capture_default_str();
  solve->add_option("--f2", c.f2, "lower data profile (empty: zero)");
  solve->add_option("--tol", c.tolerance, "relative residual target")->capture_default_str();
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in the gap (-m, m)");
  common(spectrum);
  gap(spectrum);
  grid(spectrum);
  channels(spectrum);
  spectrum->add_option("--count", c.count, "eigenvalues per channel")->capture_default_str();
  auto* experiment = app.add_subcommand("experiment", "mollified shell or shell spectrum sweep");
  common(experiment);
  gap(experiment);
  grid(experiment);
  channels(experiment);
  experiment->add_option("--experiment", c.experiment, "mollified or shell-spectrum")
      ->capture_default_str();
  experiment->add_option("--field", c.fields, "field term, repeatable");
  experiment->add_option("--radius", c.radius, "shell radius")->capture_default_str();
  experiment->add_option("--eps", c.eps, "mollifier widths")->delimiter(',');
  experiment->add_option("--a", c.a_values, "shell strengths")->delimiter(',');
  experiment->add_option("--nu", c.nu, "Coulomb strength of w2")->capture_default_str();
  experiment->add_option("--count", c.count, "eigenvalues per channel")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion& e) {
    out << version() << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "input error: " << e.what() << "\n";
    ordered_json j = {{"version", version()},
                      {"error", {{"type", "input"}, {"message", e.what()}, {"exit_code", input}}}};
    out << j.dump(2) << "\n";
    return input;
  }
  for (auto* s : app.get_subcommands()) {
    c.command = s->get_name();
    if (const auto* o = s->get_option_no_throw("--lambda"); o != nullptr && o->count() > 0)
      c.lambda = lambda;
  }

  const auto result = run(c);
  if (!result.message.empty()) err << result.message << "\n";
  try {
    if (c.out.empty()) {
      out << result.report;
    } else {
      write_atomically(c.out, result.report);
    }
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << "\n";
    return input;
  }
  return result.exit_code;
}

}  // namespace hardy::cli
