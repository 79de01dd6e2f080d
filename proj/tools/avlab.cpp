#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "avlab/bench/config.hpp"
#include "avlab/bench/experiment.hpp"
#include "avlab/bench/path_file.hpp"
#include "avlab/bench/validate.hpp"
#include "avlab/book3d/book_simulator.hpp"
#include "avlab/coeffs/transmission.hpp"

using namespace avlab;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 1;
  std::string out;
};

struct ModelFlags {
  std::string config;
  std::string hamiltonian;
  double nu = 0, box = 0, truncation = 0;
  int nodes = 0;
  std::vector<double> kappa;
  bool kappa_set = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--config", m.config, "experiment configuration file");
  cmd->add_option("--hamiltonian", m.hamiltonian, "preset name or expression in x1, x2");
  cmd->add_option("--nu", m.nu, "diffusivity");
  cmd->add_option("--box", m.box, "half width of the domain");
  cmd->add_option("--nodes", m.nodes, "table nodes per edge");
  cmd->add_option("--truncation", m.truncation, "upper level of the unbounded edge");
}

void add_kappa(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--kappa", m.kappa, "comma-separated κ sweep")->delimiter(',')->each([&](const std::string&) {
    m.kappa_set = true;
  });
}

ExperimentConfig resolve(const ModelFlags& m, const Common& c) {
  ExperimentConfig cfg = m.config.empty() ? ExperimentConfig{} : load_config(m.config);
  if (!m.hamiltonian.empty()) cfg.model.hamiltonian = m.hamiltonian;
  if (m.nu > 0) cfg.model.nu = m.nu;
  if (m.box > 0) cfg.model.box = m.box;
  if (m.nodes > 0) cfg.nodes = m.nodes;
  if (m.truncation > 0) cfg.truncation = m.truncation;
  if (m.kappa_set) cfg.kappas = m.kappa;
  if (c.seed_set) cfg.seed = c.seed;
  return cfg;
}

std::string out_dir(const Common& c, const ExperimentConfig& cfg) {
  const std::string dir = c.out.empty() ? cfg.output : c.out;
  fs::create_directories(dir);
  return dir;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + name);
}

int print_checks(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
    ok = ok && c.passed;
  }
  std::cout << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? 0 : 1;
}

int experiment(const ExperimentConfig& cfg, const Common& c) {
  RunOptions opt;
  opt.threads = c.threads;
  opt.out = c.out;
  const auto rep = run_experiment(cfg, opt);
  for (const auto& d : rep.distances)
    std::cout << "kappa " << d.kappa << "  t " << d.time << "  combined " << d.combined << "  (tv " << d.tv
              << ", weighted ks " << d.weighted_ks << ")\n";
  std::cout << "outputs in " << (opt.out.empty() ? cfg.output : opt.out) << ", config hash " << cfg.hash() << "\n";
  return print_checks(rep.checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"averaging laboratory: Reeb-graph limits of fast Hamiltonian shear diffusions"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "master seed (overrides the configuration)")->each([&](const std::string&) {
    common.seed_set = true;
  });
  app.add_option("--threads", common.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--out", common.out, "output directory");

  ModelFlags graph_flags, coeff_flags, amb_flags, lim_flags, cmp_flags, book_flags, flow_flags;

  auto* build = app.add_subcommand("build-graph", "critical points and Reeb graph as JSON");
  add_model_flags(build, graph_flags);

  auto* coeffs = app.add_subcommand("coeffs", "edge coefficient tables (CSV) and transmission weights (JSON)");
  add_model_flags(coeffs, coeff_flags);

  auto* sim_amb = app.add_subcommand("simulate-ambient", "projected ambient path files for each κ");
  add_model_flags(sim_amb, amb_flags);
  add_kappa(sim_amb, amb_flags);

  auto* sim_graph = app.add_subcommand("simulate-graph", "limiting graph path file");
  add_model_flags(sim_graph, lim_flags);

  auto* compare = app.add_subcommand("compare", "κ sweep against the limit, or replay a manifest");
  add_model_flags(compare, cmp_flags);
  add_kappa(compare, cmp_flags);
  std::string manifest;
  compare->add_option("--manifest", manifest, "rerun a manifest and compare every output hash");
  bool keep_paths = false;
  compare->add_flag("--paths", keep_paths, "also write every ensemble as a path file");

  auto* book = app.add_subcommand("book", "ambient ℝ³ sweep against the book diffusion");
  add_model_flags(book, book_flags);
  add_kappa(book, book_flags);
  double alpha = 0;
  book->add_option("--alpha", alpha, "exponent of the confinement (1 + |x|²)^α");

  auto* flow = app.add_subcommand("flow", "n-point motions of the flow of kernels");
  add_model_flags(flow, flow_flags);
  add_kappa(flow, flow_flags);

  auto* validate = app.add_subcommand("validate", "closed-form coefficient and book-formula validations");
  auto* schema = app.add_subcommand("schema", "print the configuration schema with defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*schema) {
      std::cout << config_schema();
      return 0;
    }
    if (*validate) return print_checks(run_validations(common.threads));
    if (*build) {
      const auto cfg = resolve(graph_flags, common);
      const auto setup = build_planar(cfg, common.threads);
      const auto text = setup->graph.to_json();
      if (common.out.empty()) std::cout << text << "\n";
      else write_file(out_dir(common, cfg), "graph.json", text);
      return 0;
    }
    if (*coeffs) {
      const auto cfg = resolve(coeff_flags, common);
      const auto setup = build_planar(cfg, common.threads);
      const auto dir = out_dir(common, cfg);
      for (const auto& e : setup->graph.edges)
        write_file(dir, "edge_" + std::to_string(e.id) + ".csv", setup->model->table(e.id).to_csv());
      std::vector<VertexTransmission> tw;
      for (std::size_t v = 0; v < setup->graph.vertices.size(); ++v) tw.push_back(setup->model->transmission(static_cast<int>(v)));
      write_file(dir, "transmissions.json", transmissions_to_json(tw));
      write_file(dir, "graph.json", setup->graph.to_json());
      std::cout << setup->graph.edges.size() << " edge tables written to " << dir << "\n";
      return 0;
    }
    if (*sim_amb) {
      const auto cfg = resolve(amb_flags, common);
      const auto setup = build_planar(cfg, common.threads);
      const auto dir = out_dir(common, cfg);
      for (double kappa : cfg.kappas) {
        AmbientConfig ac;
        ac.kappa = kappa;
        ac.dt = cfg.dt;
        ac.h_max = cfg.truncation;
        const auto ens = simulate_projected(setup->sys, *setup->projection, ac, planar_init(cfg.init), cfg.times,
                                            cfg.n_paths, cfg.seed, common.threads);
        std::ostringstream stem;
        stem << "ambient_k" << kappa;
        write_paths((fs::path(dir) / (stem.str() + ".avlp")).string(), ens);
        write_file(dir, stem.str() + "_marginals.csv", marginals_csv(ens));
        std::cout << stem.str() << ": " << ens.paths.size() << " paths, " << ens.flagged() << " flagged\n";
      }
      return 0;
    }
    if (*sim_graph) {
      const auto cfg = resolve(lim_flags, common);
      const auto setup = build_planar(cfg, common.threads);
      SimulationParams sp;
      sp.dt = cfg.dt;
      sp.seed = cfg.seed;
      sp.threads = common.threads;
      const auto ens = simulate_graph_paths(*setup->model, projected_graph_law(*setup->projection, planar_init(cfg.init)),
                                            cfg.times, cfg.n_paths, sp);
      const auto dir = out_dir(common, cfg);
      write_paths((fs::path(dir) / "limit.avlp").string(), ens);
      write_file(dir, "limit_marginals.csv", marginals_csv(ens));
      std::cout << "limit: " << ens.paths.size() << " paths, " << ens.flagged() << " flagged\n";
      return 0;
    }
    if (*compare) {
      if (!manifest.empty()) {
        std::ifstream in(manifest);
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + manifest);
        std::ostringstream text;
        text << in.rdbuf();
        RunOptions opt;
        opt.threads = common.threads;
        opt.out = common.out;
        const auto r = replay_manifest(text.str(), opt);
        for (const auto& m : r.mismatched) std::cout << "MISMATCH  " << m << "\n";
        std::cout << (r.identical ? "replay identical" : "replay differs") << "\n";
        return r.identical ? 0 : 1;
      }
      auto cfg = resolve(cmp_flags, common);
      if (cmp_flags.config.empty()) throw Error(ErrorKind::ConfigError, "compare needs --config or --manifest");
      RunOptions opt;
      opt.threads = common.threads;
      opt.out = common.out;
      opt.write_paths = keep_paths;
      const auto rep = run_experiment(cfg, opt);
      for (const auto& d : rep.distances)
        std::cout << "kappa " << d.kappa << "  t " << d.time << "  combined " << d.combined << "\n";
      return print_checks(rep.checks);
    }
    if (*book) {
      auto cfg = resolve(book_flags, common);
      cfg.kind = ExperimentKind::Book;
      if (alpha > 0) cfg.model.confinement = alpha;
      if (book_flags.config.empty()) {
        cfg.init.law = "gaussian";
        cfg.init.center = {0.0, 0.0, 0.0};
        cfg.name = "book";
      }
      return experiment(cfg, common);
    }
    if (*flow) {
      auto cfg = resolve(flow_flags, common);
      if (cfg.kind != ExperimentKind::Flow) throw Error(ErrorKind::ConfigError, "flow needs a configuration of kind flow");
      return experiment(cfg, common);
    }
  } catch (const Error& e) {
    nlohmann::json j{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "Internal"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 2;
  }
  return 0;
}
