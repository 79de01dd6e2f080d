// Acceptance run: one PASS/FAIL line per criterion. Usage:
//   acceptance [--threads N] [--out DIR] [criterion ...]
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "avlab/bench/config.hpp"
#include "avlab/bench/experiment.hpp"
#include "avlab/bench/statistics.hpp"
#include "avlab/bench/validate.hpp"
#include "avlab/common/error.hpp"

using namespace avlab;
namespace fs = std::filesystem;

namespace {

unsigned g_threads = 1;
fs::path g_out = "acceptance_out";

struct Outcome {
  bool passed = true;
  std::vector<std::string> lines;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

void absorb(Outcome& o, const ExperimentReport& rep) {
  for (const auto& c : rep.checks) o.require(c.passed, c.name + (c.detail.empty() ? "" : ": " + c.detail));
}

ExperimentConfig radial_config() {
  ExperimentConfig c;
  c.name = "radial";
  c.model.hamiltonian = "radial-quadratic";
  c.model.box = 10;
  c.nodes = 64;
  c.truncation = 40;
  c.dt = 1e-3;
  return c;
}

const std::vector<CheckResult>& validations() {
  static const std::vector<CheckResult> v = run_validations(g_threads);
  return v;
}

int validation_group(const std::string& name) {
  if (name.rfind("radial", 0) == 0) return 3;
  if (name.rfind("duffing", 0) == 0) return 4;
  if (name.rfind("pure-diffusion", 0) == 0 || name.rfind("noise", 0) == 0) return 9;
  return 7;
}

Outcome from_validations(int group) {
  Outcome o;
  for (const auto& c : validations())
    if (validation_group(c.name) == group) o.require(c.passed, c.name + (c.detail.empty() ? "" : ": " + c.detail));
  if (o.lines.empty()) o.require(false, "no validation checks in this group");
  return o;
}

Outcome radial_exact_averaging() {
  Outcome o;
  auto cfg = radial_config();
  const auto setup = build_planar(cfg, g_threads);
  const auto init = annulus_law({0, 0}, 1.2, 1.6);
  const std::vector<double> times{1.0};
  const std::size_t n = 100000;
  AmbientConfig ac;
  ac.dt = cfg.dt;
  ac.h_max = cfg.truncation;
  ac.kappa = 0;
  const auto still = EmpiricalLaw::from_ensemble(simulate_projected(setup->sys, *setup->projection, ac, init, times, n, 11, g_threads));
  ac.kappa = 100;
  const auto fast = EmpiricalLaw::from_ensemble(simulate_projected(setup->sys, *setup->projection, ac, init, times, n, 12, g_threads));
  SimulationParams sp;
  sp.dt = cfg.dt;
  sp.seed = 13;
  sp.threads = g_threads;
  const auto limit = EmpiricalLaw::from_ensemble(
      simulate_graph_paths(*setup->model, projected_graph_law(*setup->projection, init), times, n, sp));
  auto ks = [&](const char* what, const EmpiricalLaw& a, const EmpiricalLaw& b) {
    const auto r = ks_distance(a.values(0), b.values(0));
    o.require(r.below(), std::string(what) + ": KS " + fmt(r.statistic) + " < " + fmt(r.threshold_99) + " (n = " +
                             std::to_string(a.size()) + ", " + std::to_string(b.size()) + ")");
  };
  ks("kappa 0 vs kappa 100", still, fast);
  ks("kappa 0 vs graph", still, limit);
  ks("kappa 100 vs graph", fast, limit);
  return o;
}

Outcome radial_moments() {
  Outcome o;
  auto cfg = radial_config();
  const auto setup = build_planar(cfg, g_threads);
  const auto init = point_law<2>(Vec2(std::sqrt(2.0), 0.0));
  const std::vector<double> times{0.5, 1.0, 2.0};
  SimulationParams sp;
  sp.dt = cfg.dt;
  sp.seed = 21;
  sp.threads = g_threads;
  const auto limit = EmpiricalLaw::from_ensemble(
      simulate_graph_paths(*setup->model, projected_graph_law(*setup->projection, init), times, 100000, sp));
  AmbientConfig ac;
  ac.kappa = 10;
  ac.dt = cfg.dt;
  ac.h_max = cfg.truncation;
  const auto amb = EmpiricalLaw::from_ensemble(simulate_projected(setup->sys, *setup->projection, ac, init, times, 20000, 22, g_threads));
  for (std::size_t k = 0; k < times.size(); ++k)
    for (const auto* law : {&limit, &amb}) {
      const auto s = law->summary(k);
      const double err = std::abs(s.mean - (1 + times[k]));
      o.require(err <= 3 * s.stderr_mean, std::string(law == &limit ? "graph" : "ambient kappa 10") + " t=" + fmt(times[k]) +
                                             ": |mean - (1+t)| = " + fmt(err) + " <= 3 stderr = " + fmt(3 * s.stderr_mean));
    }
  return o;
}

ExperimentConfig duffing_sweep() {
  ExperimentConfig c;
  c.name = "duffing-sweep";
  c.init.law = "annulus";
  c.init.center = {0.0, 1.5};
  c.init.r_in = 0.1;
  c.init.r_out = 0.3;
  c.kappas = {1, 10, 100};
  c.times = {0.5, 1.0};
  c.n_paths = 50000;
  c.seed = 5;
  c.max_distance = 0.05;
  c.monotone = true;
  return c;
}

Outcome duffing_convergence() {
  Outcome o;
  RunOptions opt;
  opt.threads = g_threads;
  opt.out = (g_out / "duffing").string();
  const auto rep = run_experiment(duffing_sweep(), opt);
  for (const auto& d : rep.distances)
    o.lines.push_back("     kappa=" + fmt(d.kappa) + " t=" + fmt(d.time) + ": combined " + fmt(d.combined));
  for (const auto& c : rep.checks)
    if (c.name.rfind("within_noise", 0) != 0) o.require(c.passed, c.name + ": " + c.detail);
  return o;
}

struct ExitCounter : StepObserver {
  int vertex = -1;
  std::vector<EdgeEnd> ends;
  std::vector<long> count;
  void on_vertex(int v, const EdgeEnd& chosen) override {
    if (v != vertex) return;
    for (std::size_t k = 0; k < ends.size(); ++k)
      if (chosen == ends[k]) ++count[k];
  }
};

Outcome vertex_flux() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.nodes = 64;
  const auto setup = build_planar(cfg, g_threads);
  const auto& m = *setup->model;
  int saddle = -1;
  for (const auto& v : m.graph().vertices)
    if (v.degree() == 3) saddle = v.id;
  const auto& tw = m.transmission(saddle);
  int outer = -1;
  for (const auto& e : m.graph().edges)
    if (!e.bounded()) outer = e.id;

  auto frequencies = [&](double dt, std::uint64_t seed) {
    ExitCounter c;
    c.vertex = saddle;
    c.ends = tw.ends;
    c.count.assign(tw.ends.size(), 0);
    RandomStream rng(seed, StreamId::GraphPath, 0);
    const double h_saddle = m.graph().vertex(saddle).level;
    GraphState s{outer, h_saddle + 0.05};
    long total = 0;
    while (total < 20000) {
      s = m.step(s, dt, rng, &c);
      if (s.edge == outer && s.h > h_saddle + 0.75) s = {outer, h_saddle + 0.05};
      total = 0;
      for (long x : c.count) total += x;
    }
    std::vector<double> f;
    for (long x : c.count) f.push_back(static_cast<double>(x) / total);
    return std::make_pair(f, total);
  };
  const auto [coarse, n1] = frequencies(1e-3, 31);
  const auto [fine, n2] = frequencies(5e-4, 32);
  for (std::size_t k = 0; k < tw.ends.size(); ++k) {
    const double p = tw.probabilities[k];
    const double sd1 = std::sqrt(p * (1 - p) / n1);
    o.require(std::abs(coarse[k] - p) <= 3 * sd1, "end " + std::to_string(k) + ": frequency " + fmt(coarse[k]) + " vs alpha " +
                                                      fmt(p) + " (3 sigma " + fmt(3 * sd1) + ", " + std::to_string(n1) + " visits)");
    const double sd = std::sqrt(p * (1 - p) * (1.0 / n1 + 1.0 / n2));
    o.require(std::abs(fine[k] - coarse[k]) < 2 * sd, "end " + std::to_string(k) + ": dt halved changes frequency by " +
                                                          fmt(std::abs(fine[k] - coarse[k])) + " < 2 sigma " + fmt(2 * sd));
  }
  return o;
}

ExperimentConfig book_sweep() {
  ExperimentConfig c;
  c.kind = ExperimentKind::Book;
  c.name = "book";
  c.init.law = "gaussian";
  c.init.center = {0.0, 0.0, 0.0};
  c.init.sd = 0.6;
  c.init.radius = 2.0;
  c.kappas = {100};
  c.times = {1.0};
  c.n_paths = 50000;
  c.seed = 8;
  c.max_distance = 0.07;
  c.page_uniformity = true;
  return c;
}

Outcome book_diffusion() {
  Outcome o;
  RunOptions opt;
  opt.threads = g_threads;
  opt.out = (g_out / "book").string();
  const auto rep = run_experiment(book_sweep(), opt);
  for (const auto& d : rep.distances) o.lines.push_back("     kappa=" + fmt(d.kappa) + ": combined " + fmt(d.combined));
  absorb(o, rep);
  return o;
}

ExperimentConfig flow_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::Flow;
  c.name = "flow";
  c.nodes = 64;
  c.noise.compressible = true;
  c.noise_fraction = 0.9;
  c.starts = {{1.0, 1.2}, {-1.0, 1.2}};
  c.kappas = {100};
  c.times = {0.5};
  c.n_paths = 20000;
  c.seed = 9;
  return c;
}

Outcome flows() {
  Outcome o;
  RunOptions opt;
  opt.threads = g_threads;
  opt.out = (g_out / "flow").string();
  const auto rep = run_experiment(flow_config(), opt);
  absorb(o, rep);
  std::size_t pairs = 0;
  for (const auto& c : rep.checks) pairs += c.name.rfind("pair_moment", 0) == 0;
  o.require(pairs == 4, std::to_string(pairs) + " test-function pairs compared");
  for (const auto& c : validations())
    if (validation_group(c.name) == 9) o.require(c.passed, c.name + ": " + c.detail);
  return o;
}

Outcome determinism() {
  Outcome o;
  auto small = [](ExperimentConfig c, std::size_t n) {
    c.n_paths = n;
    return c;
  };
  auto flow = small(flow_config(), 2000);
  flow.correlation_samples = 20000;
  const std::vector<ExperimentConfig> configs{small(duffing_sweep(), 4000), small(book_sweep(), 4000), flow};
  for (const auto& cfg : configs) {
    const auto dir = g_out / "replay" / cfg.name;
    fs::remove_all(dir);
    RunOptions first;
    first.threads = 1;
    first.out = (dir / "threads1").string();
    first.write_paths = true;
    run_experiment(cfg, first);
    std::ifstream in(dir / "threads1" / "manifest.json");
    std::stringstream manifest;
    manifest << in.rdbuf();
    RunOptions again = first;
    again.threads = 8;
    again.out = (dir / "threads8").string();
    const auto r = replay_manifest(manifest.str(), again);
    std::string detail = cfg.name + ": replay with 8 threads ";
    if (r.identical) detail += "bit-identical";
    else
      for (const auto& f : r.mismatched) detail += f + " ";
    o.require(r.identical, detail);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_threads = std::max(1u, std::thread::hardware_concurrency());
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--threads" && i + 1 < argc) g_threads = static_cast<unsigned>(std::stoul(argv[++i]));
    else if (a == "--out" && i + 1 < argc) g_out = argv[++i];
    else only.insert(std::stoi(a));
  }
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"radial averaging is exact", radial_exact_averaging}},
      {2, {"radial first moment", radial_moments}},
      {3, {"radial coefficient oracles", [] { return from_validations(3); }}},
      {4, {"duffing end asymptotics", [] { return from_validations(4); }}},
      {5, {"duffing averaging convergence", duffing_convergence}},
      {6, {"saddle exit frequencies", vertex_flux}},
      {7, {"book formulas", [] { return from_validations(7); }}},
      {8, {"book diffusion", book_diffusion}},
      {9, {"flows", flows}},
      {10, {"manifest replay", determinism}},
  };
  std::cout << "threads: " << g_threads << "\n";
  bool all = true;
  for (const auto& [id, entry] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.passed;
    std::cout << "criterion " << id << " " << (o.passed ? "PASS" : "FAIL") << "  " << entry.first << " (" << fmt(secs)
              << " s)\n";
    for (const auto& l : o.lines) std::cout << "    " << l << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
