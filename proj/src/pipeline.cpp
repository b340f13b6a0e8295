#include "qsturm/pipeline.hpp"

#include "qsturm/errors.hpp"
#include "qsturm/problem.hpp"
#include "qsturm/verify.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace qsturm {

using json = nlohmann::ordered_json;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Equilibria: return "equilibria";
    case Stage::Permutation: return "permutation";
    case Stage::Graph: return "graph";
    case Stage::Verify: return "verify";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::Equilibria, Stage::Permutation, Stage::Graph, Stage::Verify})
    if (to_string(s) == name) return s;
  throw ValidationError("unknown stage '" + std::string(name) + "'");
}

void write_dot(const ConnectionGraph& graph, std::uint64_t seed, std::ostream& out) {
  std::map<int, std::vector<int>, std::greater<>> ranks;
  for (const auto& n : graph.nodes) ranks[n.morse].push_back(n.label);
  out << "digraph attractor {\n";
  out << "  comment=\"seed " << seed << "\";\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=circle];\n";
  for (const auto& [morse, labels] : ranks) {
    out << "  { rank=same;";
    for (int l : labels) out << " u" << l << " [label=\"u" << l << "\\ni=" << morse << "\"];";
    out << " }\n";
  }
  for (const auto& e : graph.edges)
    out << "  u" << e.source << " -> u" << e.target << " [label=\"z=" << e.zero_number << "\"];\n";
  out << "}\n";
}

void write_profiles_csv(std::span<const EquilibriumProfile> equilibria, std::ostream& out) {
  out << 'x';
  for (const auto& e : equilibria) out << ",u" << e.label;
  out << "\r\n";
  if (equilibria.empty()) return;
  const auto precision = out.precision(17);
  const Eigen::VectorXd& x = equilibria.front().x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out << x[i];
    for (const auto& e : equilibria) out << ',' << e.u[i];
    out << "\r\n";
  }
  out.precision(precision);
}

namespace {

class RunLog {
public:
  RunLog(const std::filesystem::path& path, std::ostream* echo) : file_(path), echo_(echo) {}
  void operator()(const std::string& line) {
    file_ << line << '\n';
    file_.flush();
    if (echo_) *echo_ << line << '\n';
  }

private:
  std::ofstream file_;
  std::ostream* echo_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

json equilibrium_json(const EquilibriumProfile& e) {
  return json{{"label", e.label},
              {"b", e.b},
              {"u_pi", e.u_end()},
              {"morse", e.morse},
              {"angle_end", e.angle_end},
              {"hyperbolic_margin", e.hyperbolic_margin},
              {"amplitude", e.amplitude()}};
}

json matrix_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

struct Failure {
  int code;
  std::string kind;
};

Failure classify(const std::exception& e) {
  if (dynamic_cast<const TangencySuspected*>(&e)) return {kExitNonHyperbolic, "TangencySuspected"};
  if (dynamic_cast<const NonHyperbolic*>(&e)) return {kExitNonHyperbolic, "NonHyperbolic"};
  if (dynamic_cast<const NotDissipativeOnProbe*>(&e)) return {kExitNotDissipative, "NotDissipativeOnProbe"};
  if (dynamic_cast<const CrosscheckMismatch*>(&e)) return {kExitCrosscheckMismatch, "CrosscheckMismatch"};
  if (dynamic_cast<const VerificationContradiction*>(&e))
    return {kExitVerificationContradiction, "VerificationContradiction"};
  if (dynamic_cast<const IoError*>(&e)) return {kExitUsage, "IoError"};
  if (dynamic_cast<const ValidationError*>(&e)) return {kExitUsage, "ValidationError"};
  if (dynamic_cast<const SyntaxError*>(&e)) return {kExitUsage, "SyntaxError"};
  if (dynamic_cast<const Error*>(&e)) return {kExitNumericFailure, "NumericFailure"};
  return {kExitUnexpected, "Unexpected"};
}

}  // namespace

int run(const RunConfig& config, std::ostream* echo) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) {
    if (echo) *echo << "error: cannot create output directory " << config.out.string() << ": " << ec.message() << '\n';
    return kExitUsage;
  }
  RunLog log(config.out / "run.log", echo);
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    std::ostringstream s;
    s.precision(3);
    s << std::fixed << std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() << "s";
    return s.str();
  };

  json report;
  report["format"] = "qsturm-report";
  report["version"] = 1;
  report["problem"] = config.problem.string();
  report["stage"] = std::string(to_string(config.stage));
  report["seed"] = config.seed;

  int code = kExitOk;
  try {
    ProblemFile problem = read_problem_file(config.problem);
    if (config.scan) problem.spec.scan_points = *config.scan;
    if (config.tol) problem.spec.rtol = *config.tol;
    if (config.grid) problem.verify.grid = *config.grid;
    problem.spec.validate();
    if (problem.verify.grid < 101) throw ValidationError("--grid must be at least 101");
    const ProblemSpec& spec = problem.spec;

    log("problem " + config.problem.string());
    std::istringstream resolved(describe(problem));
    for (std::string line; std::getline(resolved, line);) log("  " + line);
    log("seed " + std::to_string(config.seed) + ", stage " + std::string(to_string(config.stage)));

    json params = json::object();
    for (const auto& [k, v] : problem.parameters) params[k] = v;
    report["spec"] = json{{"a", to_string(spec.a)},
                          {"f", to_string(spec.f)},
                          {"parameters", params},
                          {"scan_points", spec.scan_points},
                          {"profile_grid", spec.profile_grid},
                          {"rtol", spec.rtol},
                          {"atol", spec.atol},
                          {"hyperbolicity_margin", spec.hyperbolicity_margin}};

    const EquilibriumScan scan = scan_equilibria(spec);
    const auto& eqs = scan.equilibria;
    report["window"] = json{{"b_min", scan.window.b_min}, {"b_max", scan.window.b_max}};
    json eq_json = json::array();
    for (const auto& e : eqs) eq_json.push_back(equilibrium_json(e));
    report["equilibria"] = eq_json;
    report["warnings"] = scan.warnings;
    {
      std::ostringstream csv;
      write_profiles_csv(eqs, csv);
      write_text(config.out / "profiles.csv", csv.str());
    }
    log("equilibria: " + std::to_string(eqs.size()) + " found with " + std::to_string(scan.shots) + " shots [" +
        elapsed() + "]");
    for (const auto& w : scan.warnings) log("warning: " + w);

    if (config.stage >= Stage::Permutation) {
      const SturmPermutation sigma = build_permutation(eqs, spec.root_separation);
      const ZeroMatrix z = zero_matrix(eqs);
      const CrosscheckResult cc = permutation_crosscheck(sigma, eqs, z);
      report["permutation"] = sigma.values();
      report["zero_matrix"] = matrix_json(z.matrix());
      report["crosscheck"] = json{{"ok", cc.ok()},
                                  {"morse_match", cc.morse_match},
                                  {"zero_match", cc.zero_match},
                                  {"morse_from_permutation", cc.from_permutation.morse},
                                  {"mismatches", cc.mismatches}};
      std::vector<std::string> warnings = scan.warnings;
      warnings.insert(warnings.end(), sigma.warnings.begin(), sigma.warnings.end());
      warnings.insert(warnings.end(), z.warnings.begin(), z.warnings.end());
      report["warnings"] = warnings;
      std::ostringstream s;
      for (int v : sigma.values()) s << ' ' << v;
      log("permutation:" + s.str() + ", crosscheck " + (cc.ok() ? "ok" : "MISMATCH") + " [" + elapsed() + "]");
      for (const auto& m : cc.mismatches) log("mismatch: " + m);
      enforce(cc);

      if (config.stage >= Stage::Graph) {
        const ConnectionGraph graph = connection_graph(eqs, z);
        json edges = json::array();
        for (const auto& e : graph.edges)
          edges.push_back(json{{"source", e.source}, {"target", e.target}, {"zero_number", e.zero_number}});
        report["edges"] = edges;
        report["acyclic"] = graph.acyclic();
        std::ostringstream dot;
        write_dot(graph, config.seed, dot);
        write_text(config.out / "attractor.dot", dot.str());
        log("graph: " + std::to_string(graph.edges.size()) + " edges [" + elapsed() + "]");

        if (config.stage >= Stage::Verify) {
          HeteroclinicOptions opt;
          opt.m = problem.verify.grid;
          opt.t_end = problem.verify.t_end;
          opt.epsilon_factor = problem.verify.epsilon;
          opt.random_samples = problem.verify.random_samples;
          opt.seed = config.seed;
          opt.keep_trajectories = config.trajectories;
          if (config.trajectories) std::filesystem::create_directories(config.out / "trajectories");

          json sources = json::array();
          json verdicts = json::array();
          json contradictions = json::array();
          for (const auto& e : eqs) {
            if (e.morse < 1) continue;
            const auto seeds = explore_unstable_manifold(spec, e.label, eqs, opt);
            json seed_json = json::array();
            for (const auto& s : seeds) {
              seed_json.push_back(json{{"seed", s.seed},
                                       {"reached", s.reached ? json(*s.reached) : json(nullptr)},
                                       {"t_final", s.t_final}});
              if (s.reached && !graph.in_closure(e.label, *s.reached))
                contradictions.push_back(json{{"source", e.label}, {"target", *s.reached}, {"seed", s.seed}});
              if (s.trajectory) {
                std::ostringstream csv;
                write_snapshots_csv(*s.trajectory, csv);
                write_text(config.out / "trajectories" / ("u" + std::to_string(e.label) + "_" + s.seed + ".csv"),
                           csv.str());
              }
            }
            sources.push_back(json{{"source", e.label}, {"seeds", seed_json}});
            for (const auto& edge : graph.edges) {
              if (edge.source != e.label) continue;
              const HeteroclinicCheck check = verdict_from(edge.source, edge.target, seeds);
              verdicts.push_back(json{{"source", edge.source},
                                      {"target", edge.target},
                                      {"verdict", to_string(check.verdict)}});
              log("verify u" + std::to_string(edge.source) + " -> u" + std::to_string(edge.target) + ": " +
                  to_string(check.verdict));
            }
          }
          report["verification"] = json{{"grid", opt.m},
                                        {"t_end", opt.t_end},
                                        {"epsilon_factor", opt.epsilon_factor},
                                        {"random_samples", opt.random_samples},
                                        {"edges", verdicts},
                                        {"sources", sources},
                                        {"contradictions", contradictions}};
          log("verification done [" + elapsed() + "]");
          if (!contradictions.empty())
            throw VerificationContradiction(std::to_string(contradictions.size()) +
                                            " simulated connection(s) outside the predicted closure");
        }
      }
    }
    report["status"] = json{{"exit_code", kExitOk}, {"error", nullptr}};
  } catch (const std::exception& e) {
    const Failure f = classify(e);
    code = f.code;
    report["status"] = json{{"exit_code", code}, {"error", json{{"kind", f.kind}, {"message", e.what()}}}};
    log("error (" + f.kind + "): " + e.what());
  }

  try {
    write_text(config.out / "report.json", report.dump(2) + "\n");
  } catch (const IoError& e) {
    log(std::string("error: ") + e.what());
    if (code == kExitOk) code = kExitUsage;
  }
  log("exit " + std::to_string(code) + " [" + elapsed() + "]");
  return code;
}

}  // namespace qsturm
