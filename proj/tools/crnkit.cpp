// crnkit command-line front end. Results go to stdout, diagnostics to stderr.
// Exit status: 0 success, 1 domain infeasibility or failed check, 2 usage or
// parse error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "crnkit/dsl.hpp"
#include "crnkit/equilibria.hpp"
#include "crnkit/interconnect.hpp"
#include "crnkit/reduce.hpp"
#include "crnkit/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace crnkit;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Domain failure whose report is still printed on stdout.
class Infeasible : public std::runtime_error {
 public:
  Infeasible(const std::string& what, json report)
      : std::runtime_error(what), report(std::move(report)) {}
  json report;
};

/// A check ran to completion and found a violation.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

json to_json(const IntVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

double parse_number(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw UsageError("invalid number '" + s + "' in " + what);
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(item);
  }
  return out;
}

/// "1.5,0.5" in species order, or "A=1.5,B=0.5" naming every species.
Vector parse_state(const std::string& text, const ReactionNetwork& net) {
  const auto items = split(text, ',');
  Vector x(static_cast<Eigen::Index>(net.num_species()));
  if (!items.empty() && items[0].find('=') != std::string::npos) {
    std::vector<bool> seen(net.num_species(), false);
    for (const auto& item : items) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--x0 mixes named and positional values");
      const auto idx = net.find_species(item.substr(0, eq));
      if (!idx) throw UsageError("--x0 names unknown species '" + item.substr(0, eq) + "'");
      if (seen[*idx]) throw UsageError("--x0 repeats species '" + item.substr(0, eq) + "'");
      seen[*idx] = true;
      x[static_cast<Eigen::Index>(*idx)] = parse_number(item.substr(eq + 1), "--x0");
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw UsageError("--x0 must give every species");
    }
  } else {
    if (items.size() != net.num_species()) {
      throw UsageError("--x0 has " + std::to_string(items.size()) + " values, network has " +
                       std::to_string(net.num_species()) + " species");
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      x[static_cast<Eigen::Index>(i)] = parse_number(items[i], "--x0");
    }
  }
  if ((x.array() <= 0.0).any()) throw UsageError("--x0 must be strictly positive");
  return x;
}

std::string complex_name(std::size_t index) { return "C" + std::to_string(index + 1); }

json certificate_json(const InfeasibilityCertificate& cert, const ReactionNetwork& net) {
  if (const auto* irr = std::get_if<IrreversibleCertificate>(&cert)) {
    const auto& rx = net.reactions[irr->reaction];
    return {{"type", "irreversible"},
            {"reaction", irr->reaction + 1},
            {"label", net.complex_label(rx.substrate) + " -> " + net.complex_label(rx.product)}};
  }
  if (const auto* w = std::get_if<WegscheiderCertificate>(&cert)) {
    return {{"type", "wegscheider"}, {"sigma", to_json(w->sigma)}, {"violation", w->violation}};
  }
  return nullptr;
}

struct Loaded {
  ReactionNetwork net;
  ComplexGraph g;
};

Loaded load(const std::string& path) {
  Loaded out{read_network_file(path), {}};
  out.g = build_complex_graph(out.net);
  return out;
}

/// Balanced form at the declared equilibrium, or at a computed one.
BalancedForm require_balanced(const Loaded& in) {
  if (in.net.equilibrium) {
    try {
      return verify_declared_equilibrium(in.net, in.g, *in.net.equilibrium);
    } catch (const DetailedBalanceViolation& e) {
      throw Infeasible("declared equilibrium violates detailed balance",
                       {{"balanced", false},
                        {"source", "declared"},
                        {"error", e.what()},
                        {"reaction", e.reaction() + 1}});
    }
  }
  auto res = find_thermodynamic_equilibrium(in.net, in.g);
  if (!res.balanced()) {
    throw Infeasible("network is not balanced", {{"balanced", false},
                                                 {"source", "computed"},
                                                 {"certificate", certificate_json(res.certificate, in.net)}});
  }
  return *res.form;
}

std::uint64_t effective_seed(std::uint64_t flag) {
  const char* env = std::getenv("CRNKIT_SEED");
  if (!env || !*env) return flag;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw UsageError(std::string("CRNKIT_SEED is not an integer: ") + env);
  return v;
}

Vector random_state(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = std::exp(u(rng));
  return x;
}

json moiety_json(const MoietyBasis& mb) {
  json out = json::array();
  for (const auto& row : mb.rows) out.push_back(to_json(row));
  return out;
}

// ---------------------------------------------------------------- analyze

json analyze_json(const ReactionNetwork& net, const ComplexGraph& g) {
  const auto def = deficiency(g);
  const auto comp = zero_deficiency_composition_check(g);
  const auto labels = complex_labels(net, g);
  json classes = json::array();
  for (const auto& cls : g.linkage_classes) {
    json members = json::array();
    for (auto rho : cls) members.push_back(complex_name(rho));
    classes.push_back(members);
  }
  return {{"species", net.species},
          {"m", net.num_species()},
          {"r", net.num_reactions()},
          {"c", g.num_complexes()},
          {"ell", g.num_classes()},
          {"rankB", def.rank_b},
          {"rankS", def.rank_s},
          {"deficiency", def.deficiency},
          {"deficiency_per_class", def.per_class},
          {"moieties", moiety_json(conserved_moieties(g))},
          {"complexes", labels},
          {"linkage_classes", classes},
          {"class_images_intersection_dimension", comp.intersection_dimension},
          {"boundary", boundary_matrix(net).cols()}};
}

int cmd_analyze(const std::string& path) {
  const auto in = load(path);
  emit(analyze_json(in.net, in.g));
  return 0;
}

// ---------------------------------------------------------------- balance

int cmd_balance(const std::string& path) {
  const auto in = load(path);
  const BalancedForm bf = require_balanced(in);
  emit({{"balanced", true},
        {"source", in.net.equilibrium ? "declared" : "computed"},
        {"x_star", to_json(bf.x_star)},
        {"kappa", to_json(bf.kappa)}});
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string path, x0, vb, format = "csv";
  double horizon = 10.0, rtol = 1e-8, atol = 1e-10;
  std::size_t points = 0;
  bool check = false;
};

PiecewiseConstantSchedule read_schedule(const std::string& path, std::size_t b) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open schedule " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError("schedule " + path + ": " + e.what());
  }
  PiecewiseConstantSchedule s;
  if (!j.is_object() || !j.contains("segments") || !j["segments"].is_array() ||
      j["segments"].empty()) {
    throw UsageError("schedule needs a nonempty \"segments\" array");
  }
  for (const auto& seg : j["segments"]) {
    if (!seg.contains("start") || !seg["start"].is_number() || !seg.contains("vb") ||
        !seg["vb"].is_array()) {
      throw UsageError("schedule segment needs numeric \"start\" and array \"vb\"");
    }
    const double start = seg["start"].get<double>();
    if (!s.starts.empty() && !(start > s.starts.back())) {
      throw UsageError("schedule starts must increase strictly");
    }
    if (seg["vb"].size() != b) {
      throw UsageError("schedule vb has " + std::to_string(seg["vb"].size()) +
                       " entries, network has " + std::to_string(b) + " boundary species");
    }
    Vector v(static_cast<Eigen::Index>(b));
    for (std::size_t i = 0; i < b; ++i) v[static_cast<Eigen::Index>(i)] = seg["vb"][i].get<double>();
    s.starts.push_back(start);
    s.values.push_back(v);
  }
  if (s.starts.front() != 0.0) throw UsageError("schedule must start at t = 0");
  return s;
}

int cmd_simulate(const SimulateArgs& a) {
  const auto in = load(a.path);
  const Vector x0 = parse_state(a.x0, in.net);
  const BalancedForm bf = require_balanced(in);
  const IntMatrix sb = boundary_matrix(in.net);

  IntegrationOptions opts;
  opts.horizon = a.horizon;
  opts.rel_tol = a.rtol;
  opts.abs_tol = a.atol;
  if (a.points > 1) {
    opts.record_steps = false;
    for (std::size_t i = 1; i + 1 < a.points; ++i) {
      opts.output_times.push_back(a.horizon * static_cast<double>(i) /
                                  static_cast<double>(a.points - 1));
    }
  }

  const bool open = !a.vb.empty();
  if (open && sb.cols() == 0) throw UsageError("--vb given but the network has no boundary species");
  std::optional<BalancedSystem> sys;
  if (open) {
    const auto sched = read_schedule(a.vb, static_cast<std::size_t>(sb.cols()));
    opts.breakpoints = sched.breakpoints(0.0);
    sys.emplace(in.g, bf, sb, sched);
  } else {
    sys.emplace(in.g, bf);
  }
  const auto traj = integrate(*sys, x0, opts);

  const std::size_t m = in.net.num_species();
  const std::size_t k = traj.moieties.size();
  if (a.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      rows.push_back({{"t", traj.times[i]},
                      {"x", to_json(traj.states[i])},
                      {"G", traj.diagnostics[i].G},
                      {"dGdt", traj.diagnostics[i].dGdt},
                      {"moieties", to_json(traj.diagnostics[i].moieties)}});
    }
    emit({{"species", in.net.species},
          {"moieties", moiety_json(traj.moieties)},
          {"accepted_steps", traj.accepted_steps},
          {"rejected_steps", traj.rejected_steps},
          {"rows", rows}});
  } else {
    std::string out = "t";
    for (std::size_t i = 0; i < m; ++i) out += ",x_" + std::to_string(i + 1);
    out += ",G,dGdt";
    for (std::size_t i = 0; i < k; ++i) out += ",moiety_" + std::to_string(i + 1);
    out += "\n";
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
      const auto& d = traj.diagnostics[r];
      out += format_double(traj.times[r]);
      for (std::size_t i = 0; i < m; ++i) {
        out += "," + format_double(traj.states[r][static_cast<Eigen::Index>(i)]);
      }
      out += "," + format_double(d.G) + "," + format_double(d.dGdt);
      for (std::size_t i = 0; i < k; ++i) {
        out += "," + format_double(d.moieties[static_cast<Eigen::Index>(i)]);
      }
      out += "\n";
    }
    std::cout << out;
  }
  std::cerr << "crnkit: " << traj.accepted_steps << " accepted, " << traj.rejected_steps
            << " rejected steps\n";

  if (a.check) {
    bool ok = true;
    if (open) {
      const auto rep = passivity_check(traj);
      bool positive = true;
      for (const auto& x : traj.states) positive = positive && (x.array() > 0.0).all();
      std::cerr << "check: positive " << positive << ", passivity " << rep.holds
                << " (max dG/dt - mu_b^T v_b = " << rep.max_violation << ")\n";
      ok = positive && rep.holds && rep.cumulative_holds;
    } else {
      const auto rep = check_invariants(traj);
      std::cerr << "check: positive " << rep.positive << ", G nonincreasing "
                << rep.gibbs_nonincreasing << " (max increase " << rep.max_gibbs_increase
                << "), moieties constant " << rep.moieties_constant << " (max drift "
                << rep.max_moiety_drift << ")\n";
      ok = rep.ok();
    }
    if (!ok) throw CheckFailed("simulation invariant violated");
  }
  return 0;
}

// ---------------------------------------------------------------- equilibrium

int cmd_equilibrium(const std::string& path, const std::string& x0_text) {
  const auto in = load(path);
  const Vector x0 = parse_state(x0_text, in.net);
  const BalancedForm bf = require_balanced(in);
  const auto chi = chi_map(bf, in.g, x0);
  const auto mb = conserved_moieties(in.g);
  json moieties = json::array();
  for (const auto& row : mb.rows) {
    const Vector k = row.cast<double>();
    const double before = k.dot(x0), after = k.dot(chi.x1);
    moieties.push_back({{"moiety", to_json(row)},
                        {"initial", before},
                        {"final", after},
                        {"preserved", std::abs(after - before) <=
                                          1e-9 * std::max(1.0, x0.cwiseAbs().sum())}});
  }
  emit({{"x1", to_json(chi.x1)},
        {"iterations", chi.iterations},
        {"residual", chi.residual},
        {"member", is_equilibrium(bf, in.g, chi.x1).member},
        {"moieties_preserved", moieties}});
  return 0;
}

// ---------------------------------------------------------------- compose

int cmd_compose(const std::string& p1, const std::string& p2,
                const std::vector<std::string>& shares, bool identify, const std::string& out) {
  const auto a = load(p1);
  const auto b = load(p2);
  InterconnectionSpec spec;
  spec.identify_shared_complexes = identify;
  for (const auto& item : shares) {
    for (const auto& pair : split(item, ',')) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
        throw UsageError("--share expects NAME1=NAME2, got '" + pair + "'");
      }
      spec.pairs.emplace_back(pair.substr(0, eq), pair.substr(eq + 1));
    }
  }
  const auto comp = interconnect(a.net, b.net, spec);
  const std::string text = render_network(comp.network);
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + out);
    f << text;
  }
  json shared = json::array();
  for (const auto& [x, y] : spec.pairs) shared.push_back({x, y});
  json report = {{"shared", shared},
                 {"identify_complexes", identify},
                 {"renamed", comp.renamed},
                 {"analysis", analyze_json(comp.network, comp.graph)}};
  const auto zc = zero_deficiency_composition_check(comp.graph);
  report["zero_deficiency_composition"] = {{"all_classes_zero_deficient", zc.all_classes_zero_deficient},
                                           {"intersection_dimension", zc.intersection_dimension},
                                           {"intersection_trivial", zc.intersection_trivial},
                                           {"deficiency", zc.deficiency}};

  const auto ra = find_thermodynamic_equilibrium(a.net, a.g);
  const auto rb = find_thermodynamic_equilibrium(b.net, b.g);
  if (!ra.balanced() || !rb.balanced()) {
    report["balanced"] = false;
    report["certificate"] = certificate_json(ra.balanced() ? rb.certificate : ra.certificate,
                                             ra.balanced() ? b.net : a.net);
    report["unbalanced_constituent"] = ra.balanced() ? 2 : 1;
    report["network"] = text;
    throw Infeasible("constituent network is not balanced", report);
  }
  const auto bal = composite_balanced(a.net, *ra.form, b.net, *rb.form, spec);
  report["balanced"] = bal.balance.balanced();
  if (bal.balance.balanced()) {
    report["x_star"] = to_json(bal.balance.form->x_star);
    report["kappa"] = to_json(bal.balance.form->kappa);
  } else {
    report["certificate"] = certificate_json(bal.balance.certificate, comp.network);
  }
  report["partition_condition"] =
      bal.partition_condition ? json(*bal.partition_condition) : json(nullptr);
  report["scaling_first"] = bal.scaling_first;
  report["scaling_second"] = bal.scaling_second;
  report["network"] = text;
  emit(report);
  return 0;
}

// ---------------------------------------------------------------- reduce

struct ReduceArgs {
  std::string path, remove, remove_species, out;
  double horizon = 5.0;
  std::uint64_t seed = 1;
};

int cmd_reduce(const ReduceArgs& a) {
  const auto in = load(a.path);
  const BalancedForm bf = require_balanced(in);
  std::vector<std::size_t> removed;
  for (const auto& item : split(a.remove, ',')) {
    if (item.empty()) continue;
    std::string digits = item;
    if (digits[0] == 'C' || digits[0] == 'c') digits.erase(0, 1);
    char* end = nullptr;
    const long v = std::strtol(digits.c_str(), &end, 10);
    if (digits.empty() || *end != '\0' || v < 1 || static_cast<std::size_t>(v) > in.g.num_complexes()) {
      throw UsageError("--remove entry '" + item + "' is not a complex C1..C" +
                       std::to_string(in.g.num_complexes()));
    }
    removed.push_back(static_cast<std::size_t>(v - 1));
  }
  for (const auto& name : split(a.remove_species, ',')) {
    if (name.empty()) continue;
    const auto idx = in.net.find_species(name);
    if (!idx) throw UsageError("--remove-species names unknown species '" + name + "'");
    for (auto rho : complexes_containing(in.g, *idx)) removed.push_back(rho);
  }
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());

  const auto res = kron_reduce(in.net, bf, in.g, removed);
  for (const auto& w : res.warnings) std::cerr << "crnkit: warning: " << w << "\n";
  std::string text;
  if (res.net_hat.num_reactions() > 0) text = render_network(res.net_hat);
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + a.out);
    f << text;
  }

  ReductionDiagnosticsOptions dopts;
  dopts.seed = a.seed;
  dopts.horizon = a.horizon;
  const auto d = reduction_diagnostics(bf, in.g, res, dopts);
  const auto props = laplacian_properties(res.L_hat);
  const auto labels = complex_labels(in.net, in.g);

  auto named = [&](const std::vector<std::size_t>& idx) {
    json out = json::array();
    for (auto rho : idx) out.push_back({{"id", complex_name(rho)}, {"label", labels[rho]}});
    return out;
  };
  json dropped = json::array();
  for (auto s : res.dropped_species) dropped.push_back(in.net.species[s]);
  json edges = json::array();
  for (Eigen::Index j = 0; j < res.B_hat.cols(); ++j) {
    Eigen::Index tail = 0, head = 0;
    for (Eigen::Index i = 0; i < res.B_hat.rows(); ++i) {
      if (res.B_hat(i, j) < 0) tail = i;
      if (res.B_hat(i, j) > 0) head = i;
    }
    edges.push_back({{"from", complex_name(res.retained[static_cast<std::size_t>(tail)])},
                     {"to", complex_name(res.retained[static_cast<std::size_t>(head)])},
                     {"kappa", res.K_hat[j]}});
  }
  emit({{"removed", named(res.removed)},
        {"retained", named(res.retained)},
        {"dropped_species", dropped},
        {"edges", edges},
        {"L_hat", to_json(res.L_hat)},
        {"condition_number", res.condition_number},
        {"warnings", res.warnings},
        {"laplacian", {{"asymmetry", props.asymmetry},
                       {"max_row_sum", props.max_row_sum},
                       {"min_eigenvalue", props.min_eigenvalue},
                       {"max_off_diagonal", props.max_off_diagonal},
                       {"kernel_dimension", props.kernel_dimension},
                       {"ok", props.ok()}}},
        {"diagnostics", {{"seed", a.seed},
                         {"max_equilibrium_residual", d.max_equilibrium_residual},
                         {"equilibria_included", d.equilibria_included},
                         {"full_deficiency", d.full_deficiency},
                         {"reduced_deficiency", d.reduced_deficiency},
                         {"zero_deficiency_inherited", d.zero_deficiency_inherited},
                         {"trajectory_max_error", d.trajectory_max_error},
                         {"trajectory_l2_error", d.trajectory_l2_error}}},
        {"network", text}});
  return 0;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string path;
  std::size_t samples = 200, trajectories = 20;
  double horizon = 20.0;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
};

struct TrajectoryOutcome {
  InvariantReport invariants;
  double chi_error = 0.0;        // relative to max |x0|
  double idempotence = 0.0;
  double equilibrium_residual = 0.0;
  std::string error;
};

TrajectoryOutcome check_trajectory(const Loaded& in, const BalancedForm& bf, std::uint64_t seed,
                                   std::size_t index, double horizon) {
  TrajectoryOutcome out;
  try {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(index), std::uint64_t{0x7472616a}};
    std::mt19937_64 rng(seq);
    const Vector x0 = random_state(rng, in.net.num_species());
    const BalancedSystem sys(in.g, bf);
    IntegrationOptions opts;
    opts.horizon = horizon;
    out.invariants = check_invariants(integrate(sys, x0, opts));

    IntegrationOptions eq;
    eq.horizon = 1e4;
    eq.to_equilibrium = true;
    eq.record_steps = false;
    eq.rel_tol = 1e-12;
    eq.abs_tol = 1e-14;
    eq.equilibrium_tol = 1e-10;
    const auto settled = integrate(sys, x0, eq);
    const Vector x1 = chi_map(bf, in.g, x0).x1;
    out.chi_error = (settled.final_state() - x1).cwiseAbs().maxCoeff() / x0.cwiseAbs().maxCoeff();
    out.idempotence = (chi_map(bf, in.g, x1).x1 - x1).cwiseAbs().maxCoeff() /
                      x1.cwiseAbs().maxCoeff();
    out.equilibrium_residual = is_equilibrium(bf, in.g, settled.final_state()).stoichiometric_residual;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

int cmd_check(const CheckArgs& a) {
  const auto in = load(a.path);
  const BalancedForm bf = require_balanced(in);
  std::mt19937_64 rng(a.seed);
  const auto n = in.net.num_species();

  const auto lap = general_laplacian(in.net, in.g);
  double identity = 0.0, gradient = 0.0;
  for (std::size_t s = 0; s < a.samples; ++s) {
    const Vector x = random_state(rng, n);
    const Vector f = stoichiometric_dynamics(in.net, in.g, x);
    const double scale = std::max(f.cwiseAbs().maxCoeff(), 1e-300);
    identity = std::max({identity, (general_dynamics(in.g, lap, x) - f).cwiseAbs().maxCoeff() / scale,
                         (balanced_dynamics(bf, in.g, x) - f).cwiseAbs().maxCoeff() / scale});
    const Vector mu = gibbs(bf, in.g, x).mu;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double h = 1e-6 * x[ii];
      Vector up = x, dn = x;
      up[ii] += h;
      dn[ii] -= h;
      const double fd = (gibbs_energy(bf.x_star, up) - gibbs_energy(bf.x_star, dn)) / (2 * h);
      gradient = std::max(gradient, std::abs(fd - mu[ii]) / std::max(1.0, std::abs(mu[ii])));
    }
  }

  std::vector<TrajectoryOutcome> outcomes(a.trajectories);
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(a.trajectories)));
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < a.trajectories; i += jobs) {
        outcomes[i] = check_trajectory(in, bf, a.seed, i, a.horizon);
      }
    });
  }
  for (auto& t : workers) t.join();

  InvariantReport lyap;
  double chi_error = 0.0, idempotence = 0.0, eq_residual = 0.0;
  json errors = json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.error.empty()) {
      errors.push_back({{"trajectory", i}, {"error", o.error}});
      continue;
    }
    lyap.positive = lyap.positive && o.invariants.positive;
    lyap.gibbs_nonincreasing = lyap.gibbs_nonincreasing && o.invariants.gibbs_nonincreasing;
    lyap.moieties_constant = lyap.moieties_constant && o.invariants.moieties_constant;
    lyap.max_gibbs_increase = std::max(lyap.max_gibbs_increase, o.invariants.max_gibbs_increase);
    lyap.max_moiety_drift = std::max(lyap.max_moiety_drift, o.invariants.max_moiety_drift);
    chi_error = std::max(chi_error, o.chi_error);
    idempotence = std::max(idempotence, o.idempotence);
    eq_residual = std::max(eq_residual, o.equilibrium_residual);
  }

  const bool passed = errors.empty() && identity <= 1e-10 && gradient <= 1e-6 && lyap.ok() &&
                      chi_error <= 1e-5 && idempotence <= 1e-10 && eq_residual <= 1e-6;
  emit({{"seed", a.seed},
        {"samples", a.samples},
        {"trajectories", a.trajectories},
        {"identity_max_rel_error", identity},
        {"gradient_max_rel_error", gradient},
        {"lyapunov", {{"positive", lyap.positive},
                      {"gibbs_nonincreasing", lyap.gibbs_nonincreasing},
                      {"max_gibbs_increase", lyap.max_gibbs_increase},
                      {"moieties_constant", lyap.moieties_constant},
                      {"max_moiety_drift", lyap.max_moiety_drift}}},
        {"chi_max_error", chi_error},
        {"chi_max_idempotence_error", idempotence},
        {"equilibrium_max_residual", eq_residual},
        {"errors", errors},
        {"passed", passed}});
  if (!passed) throw CheckFailed("property check failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crnkit: balanced mass action reaction networks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for randomized checks (CRNKIT_SEED overrides)");

  std::string path;
  auto* analyze = app.add_subcommand("analyze", "Structural analysis as JSON");
  analyze->add_option("file", path, "Network file")->required()->check(CLI::ExistingFile);

  auto* balance = app.add_subcommand("balance", "Decide detailed balance, print x* and kappa");
  balance->add_option("file", path, "Network file")->required()->check(CLI::ExistingFile);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the balanced dynamics, CSV output");
  simulate->add_option("file", sim.path, "Network file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--x0", sim.x0, "Initial state: v1,v2,... or A=v1,B=v2,...")->required();
  simulate->add_option("--t", sim.horizon, "Time horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--vb", sim.vb, "Boundary flux schedule (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--rtol", sim.rtol, "Relative tolerance")->check(CLI::PositiveNumber);
  simulate->add_option("--atol", sim.atol, "Absolute tolerance")->check(CLI::PositiveNumber);
  simulate->add_option("--points", sim.points, "Uniform output grid size instead of every step");
  simulate->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  simulate->add_flag("--check", sim.check, "Fail when positivity, G or moiety invariants break");

  std::string x0;
  auto* equilibrium = app.add_subcommand("equilibrium", "Equilibrium reached from x0 (chi map)");
  equilibrium->add_option("file", path, "Network file")->required()->check(CLI::ExistingFile);
  equilibrium->add_option("--x0", x0, "Initial state")->required();

  std::string path2, out;
  std::vector<std::string> shares;
  bool identify = false;
  auto* compose = app.add_subcommand("compose", "Interconnect two open networks");
  compose->add_option("file1", path, "First network")->required()->check(CLI::ExistingFile);
  compose->add_option("file2", path2, "Second network")->required()->check(CLI::ExistingFile);
  compose->add_option("--share", shares, "Shared boundary species NAME1=NAME2")->required();
  compose->add_flag("--identify-complexes", identify, "Merge identical complexes");
  compose->add_option("--out", out, "Write the composite network here");

  ReduceArgs red;
  auto* reduce = app.add_subcommand("reduce", "Kron reduction of the complex graph");
  reduce->add_option("file", red.path, "Network file")->required()->check(CLI::ExistingFile);
  auto* rm = reduce->add_option("--remove", red.remove, "Complexes to remove, e.g. C2,C5");
  auto* rms = reduce->add_option("--remove-species", red.remove_species,
                                 "Remove every complex containing these species");
  rm->excludes(rms);
  reduce->add_option("--out", red.out, "Write the reduced network here");
  reduce->add_option("--horizon", red.horizon, "Horizon of the trajectory comparison")
      ->check(CLI::PositiveNumber);

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "Randomized property checks on a balanced network");
  check->add_option("file", chk.path, "Network file")->required()->check(CLI::ExistingFile);
  check->add_option("--samples", chk.samples, "Random states for pointwise checks");
  check->add_option("--trajectories", chk.trajectories, "Random trajectories");
  check->add_option("--horizon", chk.horizon, "Trajectory horizon")->check(CLI::PositiveNumber);
  check->add_option("--jobs", chk.jobs, "Worker threads for trajectories")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    seed = effective_seed(seed);
    if (*analyze) return cmd_analyze(path);
    if (*balance) return cmd_balance(path);
    if (*simulate) return cmd_simulate(sim);
    if (*equilibrium) return cmd_equilibrium(path, x0);
    if (*compose) return cmd_compose(path, path2, shares, identify, out);
    if (*reduce) {
      if (red.remove.empty() && red.remove_species.empty()) {
        throw UsageError("reduce needs --remove or --remove-species");
      }
      red.seed = seed;
      return cmd_reduce(red);
    }
    if (*check) {
      chk.seed = seed;
      return cmd_check(chk);
    }
  } catch (const Infeasible& e) {
    emit(e.report);
    std::cerr << "crnkit: " << e.what() << "\n";
    return 1;
  } catch (const CheckFailed& e) {
    std::cerr << "crnkit: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "crnkit: error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "crnkit: parse error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "crnkit: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "crnkit: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
