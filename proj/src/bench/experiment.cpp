#include "avlab/bench/experiment.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/version.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "avlab/bench/path_file.hpp"
#include "avlab/bench/svg_plot.hpp"
#include "avlab/book3d/book_simulator.hpp"
#include "avlab/coeffs/transmission.hpp"
#include "avlab/flows/averaged_noise.hpp"
#include "avlab/flows/npoint.hpp"
#include "avlab/reeb/critical_points.hpp"
#include "avlab/reeb/graph_builder.hpp"

namespace avlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string num(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

Vec2 vec2(const std::vector<double>& v) { return Vec2(v.at(0), v.at(1)); }
Vec3 vec3(const std::vector<double>& v) { return Vec3(v.at(0), v.at(1), v.at(2)); }

/// Writes files as they are produced and keeps their hashes in order.
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {
    if (enabled()) fs::create_directories(dir_);
  }
  bool enabled() const { return dir_ != "-"; }
  const std::string& dir() const { return dir_; }

  void put(const std::string& name, const std::string& bytes, bool record = true) {
    if (!enabled()) return;
    std::ofstream out(fs::path(dir_) / name, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + name);
    if (record) files_.emplace_back(name, sha256_hex(bytes));
  }
  std::string get(const std::string& name) const {
    std::ifstream in(fs::path(dir_) / name, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + name);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  void put_paths(const std::string& stem, const Ensemble& ens) {
    put(stem + ".avlp", encode_paths(ens));
    put(stem + "_marginals.csv", marginals_csv(ens));
  }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string kappa_stem(const std::string& prefix, double kappa) {
  std::string k = num(kappa);
  std::replace(k.begin(), k.end(), '.', 'p');
  return prefix + "_k" + k;
}

LawRow law_row(const std::string& source, double kappa, const EmpiricalLaw& law, std::size_t k) {
  LawRow r;
  r.source = source;
  r.kappa = kappa;
  r.time = law.times[k];
  r.excluded = law.excluded;
  if (law.size() > 0) r.summary = law.summary(k);
  return r;
}

DistanceRow distance_row(double kappa, const EmpiricalLaw& amb, const EmpiricalLaw& lim, std::size_t k) {
  DistanceRow row;
  row.kappa = kappa;
  row.time = amb.times[k];
  row.n_ambient = amb.size();
  row.n_limit = lim.size();
  const auto d = graph_distance(amb, lim, k);
  row.tv = d.tv;
  row.weighted_ks = d.weighted_ks;
  row.combined = d.combined;
  row.within_noise = std::all_of(d.per_label.begin(), d.per_label.end(), [](const auto& e) { return e.second.below(); });
  return row;
}

/// Book laws are compared on the angle and on the radius; the reported
/// distance is the larger of the two.
DistanceRow book_distance_row(double kappa, const Ensemble& amb, const Ensemble& lim, std::size_t k) {
  const auto a_theta = EmpiricalLaw::from_ensemble(amb, Coordinate::Second);
  const auto l_theta = EmpiricalLaw::from_ensemble(lim, Coordinate::Second);
  DistanceRow row = distance_row(kappa, a_theta, l_theta, k);
  const auto r = distance_row(kappa, EmpiricalLaw::from_ensemble(amb), EmpiricalLaw::from_ensemble(lim), k);
  row.weighted_ks = std::max(row.weighted_ks, r.weighted_ks);
  row.combined = std::max(row.combined, r.combined);
  row.within_noise = row.within_noise && r.within_noise;
  return row;
}

void sweep_checks(ExperimentReport& rep) {
  const auto& cfg = rep.config;
  if (cfg.kappas.empty()) return;
  std::vector<double> kap = cfg.kappas;
  std::sort(kap.begin(), kap.end());
  const double top = kap.back();
  for (double t : cfg.times) {
    std::vector<std::pair<double, double>> curve;
    for (const auto& d : rep.distances)
      if (d.time == t) curve.emplace_back(d.kappa, d.combined);
    std::sort(curve.begin(), curve.end());
    if (cfg.monotone && curve.size() >= 2) {
      bool ok = true;
      std::string detail;
      for (std::size_t i = 0; i < curve.size(); ++i) {
        detail += (i ? " > " : "") + num(curve[i].second);
        if (i > 0 && !(curve[i].second < curve[i - 1].second)) ok = false;
      }
      rep.checks.push_back({"monotone_in_kappa t=" + num(t), ok, detail});
    }
    if (cfg.max_distance > 0) {
      const auto it = std::find_if(curve.begin(), curve.end(), [&](const auto& c) { return c.first == top; });
      const double d = it->second;
      rep.checks.push_back({"distance_at_kappa_" + num(top) + " t=" + num(t), d < cfg.max_distance,
                            num(d) + " vs " + num(cfg.max_distance)});
    }
  }
  if (cfg.within_noise)
    for (const auto& d : rep.distances)
      rep.checks.push_back({"within_noise kappa=" + num(d.kappa) + " t=" + num(d.time), d.within_noise,
                            "combined " + num(d.combined)});
}

void run_averaging(const ExperimentConfig& cfg, const RunOptions& opt, ExperimentReport& rep, Outputs& out) {
  const auto setup = build_planar(cfg, opt.threads);
  const auto init = planar_init(cfg.init);
  SimulationParams sp;
  sp.dt = cfg.dt;
  sp.seed = cfg.seed;
  sp.threads = opt.threads;
  const auto limit =
      simulate_graph_paths(*setup->model, projected_graph_law(*setup->projection, init), cfg.times, cfg.n_paths, sp);
  if (opt.write_paths) out.put_paths("limit", limit);
  const auto lim = EmpiricalLaw::from_ensemble(limit);
  for (std::size_t k = 0; k < cfg.times.size(); ++k) rep.laws.push_back(law_row("limit", NAN, lim, k));
  for (double kappa : cfg.kappas) {
    AmbientConfig ac;
    ac.kappa = kappa;
    ac.dt = cfg.dt;
    ac.h_max = cfg.truncation;
    const auto amb_ens =
        simulate_projected(setup->sys, *setup->projection, ac, init, cfg.times, cfg.n_paths, cfg.seed, opt.threads);
    if (opt.write_paths) out.put_paths(kappa_stem("ambient", kappa), amb_ens);
    const auto amb = EmpiricalLaw::from_ensemble(amb_ens);
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
      rep.laws.push_back(law_row("ambient", kappa, amb, k));
      rep.distances.push_back(distance_row(kappa, amb, lim, k));
    }
  }
  sweep_checks(rep);
}

void run_book(const ExperimentConfig& cfg, const RunOptions& opt, ExperimentReport& rep, Outputs& out) {
  const Confinement w{cfg.model.confinement};
  const auto init = spatial_init(cfg.init);
  const auto limit =
      simulate_book_paths(BookModel(w), projected_book_law(init), cfg.times, cfg.n_paths, cfg.dt, cfg.seed, opt.threads);
  if (opt.write_paths) out.put_paths("limit", limit);
  const auto lim = EmpiricalLaw::from_ensemble(limit);
  for (std::size_t k = 0; k < cfg.times.size(); ++k) rep.laws.push_back(law_row("limit", NAN, lim, k));
  for (double kappa : cfg.kappas) {
    AmbientConfig ac;
    ac.kappa = kappa;
    ac.dt = cfg.dt;
    const auto amb_ens = simulate_book_ambient(w, ac, init, cfg.times, cfg.n_paths, cfg.seed, opt.threads);
    if (opt.write_paths) out.put_paths(kappa_stem("ambient", kappa), amb_ens);
    const auto amb = EmpiricalLaw::from_ensemble(amb_ens);
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
      rep.laws.push_back(law_row("ambient", kappa, amb, k));
      rep.distances.push_back(book_distance_row(kappa, amb_ens, limit, k));
    }
  }
  sweep_checks(rep);
  if (cfg.page_uniformity) {
    const std::size_t k = cfg.times.size() - 1;
    double counts[5] = {0, 0, 0, 0, 0}, total = 0;
    for (const auto& p : limit.paths)
      if (p.ok() && p.label[k] >= 1 && p.label[k] <= 4) counts[p.label[k]] += 1, total += 1;
    double chi2 = 0;
    for (int page = 1; page <= 4; ++page) chi2 += std::pow(counts[page] - total / 4, 2) / (total / 4);
    const double pval = total > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(3), chi2)) : 0.0;
    rep.checks.push_back({"page_uniformity t=" + num(cfg.times[k]), pval > 0.01, "chi2 p = " + num(pval)});
  }
}

/// Bounded test functions of a graph state: tanh of the level, and a bump
/// on each edge vanishing at its ends.
struct TestFunction {
  std::string name;
  std::function<double(std::int32_t, double)> f;
};

std::vector<TestFunction> test_functions(const GraphModel& model) {
  std::vector<TestFunction> fs{{"level", [](std::int32_t, double h) { return std::tanh(h); }}};
  for (const auto& e : model.graph().edges) {
    const double lo = e.lo, hi = model.top(e.id);
    const int id = e.id;
    fs.push_back({"bump" + std::to_string(id), [=](std::int32_t label, double h) {
                    if (label != id) return 0.0;
                    const double u = std::clamp((h - lo) / (hi - lo), 0.0, 1.0);
                    return 4.0 * u * (1.0 - u);
                  }});
  }
  return fs;
}

/// Mean and standard error of f(Y¹)g(Y²) over samples clean in both particles.
std::pair<double, double> pair_moment(const Ensemble& a, const Ensemble& b, std::size_t k, const TestFunction& f,
                                      const TestFunction& g) {
  double s = 0, ss = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    const auto& p = a.paths[i];
    const auto& q = b.paths[i];
    if (!p.ok() || !q.ok()) continue;
    const double v = f.f(p.label[k], p.c1[k]) * g.f(q.label[k], q.c1[k]);
    s += v;
    ss += v * v;
    ++n;
  }
  if (n < 2) throw Error(ErrorKind::EmptyLaw, "no clean two-particle samples");
  const double m = s / n;
  return {m, std::sqrt(std::max(0.0, ss / n - m * m) / (n - 1))};
}

void run_flow(const ExperimentConfig& cfg, const RunOptions& opt, ExperimentReport& rep, Outputs& out) {
  FourierPreset preset = cfg.noise;
  if (cfg.noise_fraction > 0) preset.amplitude = cfg.noise_fraction * NoiseModel::max_amplitude(cfg.model.nu, preset.delta);
  const auto noise = NoiseModel::fourier(preset);
  {
    CheckResult c{"pure_diffusion_margin", true, ""};
    try {
      c.detail = "max rate/2ν = " + num(noise.check_pure_diffusion(cfg.model.nu, make_system(cfg.model).box()));
    } catch (const Error& e) {
      c.passed = false;
      c.detail = e.what();
    }
    rep.checks.push_back(c);
    if (!c.passed) return;
  }
  const auto setup = build_planar(cfg, opt.threads, [&](const HamiltonianSystem2D& sys) { return noise_observables(sys, noise); });
  const GraphNPoint graph_np(*setup->model, AveragedNoise(*setup->model, noise.size()), cfg.clamp_tol);
  const std::size_t n = cfg.starts.size();
  std::vector<GraphInitLaw> graph_inits;
  std::vector<AmbientInitLaw<2>> amb_inits;
  for (const auto& s : cfg.starts) {
    amb_inits.push_back(point_law<2>(vec2(s)));
    graph_inits.push_back(projected_graph_law(*setup->projection, amb_inits.back()));
  }
  SimulationParams sp;
  sp.dt = cfg.dt;
  sp.seed = cfg.seed;
  sp.threads = opt.threads;

  const auto one = simulate_graph_paths(*setup->model, graph_inits.front(), cfg.times, cfg.n_paths, sp);
  const auto many = graph_np.simulate(graph_inits, cfg.times, cfg.n_paths, sp);
  rep.max_clamp = many.max_clamp;
  if (opt.write_paths) {
    out.put_paths("limit_one_point", one);
    for (std::size_t j = 0; j < n; ++j) out.put_paths("limit_p" + std::to_string(j), many.particles[j]);
  }
  const auto one_law = EmpiricalLaw::from_ensemble(one);
  const auto first_law = EmpiricalLaw::from_ensemble(many.particles.front());
  for (std::size_t k = 0; k < cfg.times.size(); ++k) {
    rep.laws.push_back(law_row("limit", NAN, one_law, k));
    for (std::size_t j = 0; j < n; ++j)
      rep.laws.push_back(law_row("limit_p" + std::to_string(j), NAN, EmpiricalLaw::from_ensemble(many.particles[j]), k));
    const auto d = distance_row(NAN, first_law, one_law, k);
    rep.checks.push_back({"one_point_consistency t=" + num(cfg.times[k]), d.within_noise,
                          "combined " + num(d.combined) + ", per-label KS below threshold: " + (d.within_noise ? "yes" : "no")});
  }
  rep.checks.push_back({"covariance_clamp", many.max_clamp <= cfg.clamp_tol,
                        num(many.max_clamp) + " vs " + num(cfg.clamp_tol)});

  // Increment correlation at the most correlated pair of a state grid.
  {
    std::vector<GraphState> grid;
    for (const auto& e : setup->graph.edges)
      for (double u : {0.1, 0.3, 0.5, 0.7, 0.9}) grid.push_back({e.id, e.lo + u * (setup->model->top(e.id) - e.lo)});
    std::vector<GraphState> ys{grid.front(), grid.front()};
    double best = -1, expected = 0;
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (std::size_t b = 0; b < a; ++b) {
        const auto c = graph_np.step_covariance({grid[a], grid[b]});
        const double r = c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
        if (std::abs(r) > best) best = std::abs(r), expected = r, ys = {grid[a], grid[b]};
      }
    RandomStream common(cfg.seed, StreamId::MonteCarlo, 0);
    std::vector<RandomStream> rngs{RandomStream(cfg.seed, StreamId::Particle, 0), RandomStream(cfg.seed, StreamId::Particle, 1)};
    double s11 = 0, s22 = 0, s12 = 0;
    for (std::size_t i = 0; i < cfg.correlation_samples; ++i) {
      const auto d = graph_np.increments(ys, cfg.dt, common, rngs);
      s11 += d[0] * d[0];
      s22 += d[1] * d[1];
      s12 += d[0] * d[1];
    }
    const double rho = s12 / std::sqrt(s11 * s22);
    const double se = (1 - expected * expected) / std::sqrt(static_cast<double>(cfg.correlation_samples));
    rep.checks.push_back({"increment_correlation", std::abs(rho - expected) <= cfg.mc_sigmas * se,
                          "states (" + std::to_string(ys[0].edge) + ", " + num(ys[0].h) + ") and (" +
                              std::to_string(ys[1].edge) + ", " + num(ys[1].h) + "): empirical " + num(rho) +
                              ", expected " + num(expected) + ", stderr " + num(se)});
  }

  if (n < 2) return;
  const auto fs = test_functions(*setup->model);
  std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 0}};
  for (std::size_t e = 1; e < fs.size() && pairs.size() < 4; ++e) pairs.emplace_back(e, 0);
  std::vector<double> kap = cfg.kappas;
  std::sort(kap.begin(), kap.end());
  for (double kappa : cfg.kappas) {
    AmbientConfig ac;
    ac.kappa = kappa;
    ac.dt = cfg.dt;
    ac.h_max = cfg.truncation;
    const AmbientNPoint amb_np(setup->sys, noise, ac);
    const auto amb = amb_np.simulate(*setup->projection, amb_inits, cfg.times, cfg.n_paths, cfg.seed, opt.threads);
    if (opt.write_paths)
      for (std::size_t j = 0; j < n; ++j) out.put_paths(kappa_stem("ambient_p" + std::to_string(j), kappa), amb.particles[j]);
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
      for (std::size_t j = 0; j < n; ++j)
        rep.laws.push_back(law_row("ambient_p" + std::to_string(j), kappa, EmpiricalLaw::from_ensemble(amb.particles[j]), k));
      for (const auto& [fi, gi] : pairs) {
        PairRow row;
        row.pair = fs[fi].name + "*" + fs[gi].name;
        row.kappa = kappa;
        row.time = cfg.times[k];
        std::tie(row.ambient, row.ambient_se) = pair_moment(amb.particles[0], amb.particles[1], k, fs[fi], fs[gi]);
        std::tie(row.limit, row.limit_se) = pair_moment(many.particles[0], many.particles[1], k, fs[fi], fs[gi]);
        rep.pairs.push_back(row);
        if (kappa == kap.back()) {
          const double se = std::hypot(row.ambient_se, row.limit_se);
          rep.checks.push_back({"pair_moment " + row.pair + " kappa=" + num(kappa) + " t=" + num(row.time),
                                std::abs(row.ambient - row.limit) <= cfg.mc_sigmas * se,
                                num(row.ambient) + " vs " + num(row.limit) + " (combined stderr " + num(se) + ")"});
        }
      }
    }
  }
}

std::string csv_kappa(double k) { return std::isnan(k) ? "" : num(k); }

void render_plots(const ExperimentReport& rep, Outputs& out) {
  if (!rep.distances.empty()) {
    PlotSpec spec;
    spec.title = rep.config.name + ": ambient vs limit";
    spec.x_column = "kappa";
    spec.y_column = "combined";
    spec.series_column = "time";
    spec.x_label = "kappa";
    spec.y_label = "combined distance";
    spec.log_x = std::all_of(rep.config.kappas.begin(), rep.config.kappas.end(), [](double k) { return k > 0; });
    if (rep.config.max_distance > 0) spec.reference = rep.config.max_distance;
    out.put("convergence.svg", render_svg(out.get("distances.csv"), spec));
  }
  PlotSpec spec;
  spec.title = rep.config.name + ": mean of the level coordinate";
  spec.x_column = "time";
  spec.y_column = "mean";
  spec.series_column = "series";
  spec.x_label = "time";
  spec.y_label = "mean";
  out.put("laws.svg", render_svg(out.get("laws.csv"), spec));
}

}  // namespace

HamiltonianSystem2D make_system(const ModelSpec& m) {
  std::shared_ptr<const VectorField2D> drift;
  if (m.drift == "restoring") drift = std::make_shared<LinearRestoring>(m.drift_rate);
  else drift = std::make_shared<ZeroField>();
  return HamiltonianSystem2D(make_hamiltonian(m.hamiltonian), drift, m.nu, Box{{-m.box, -m.box}, {m.box, m.box}},
                             m.hamiltonian);
}

std::unique_ptr<PlanarSetup> build_planar(const ExperimentConfig& cfg, unsigned threads, const ObservableFactory& extra) {
  auto s = std::make_unique<PlanarSetup>(make_system(cfg.model));
  s->graph = build_graph(s->sys, find_critical_points(s->sys));
  s->projection = std::make_unique<Projection>(s->sys, s->graph);
  GridSpec spec;
  spec.nodes = cfg.nodes;
  spec.truncation = cfg.truncation;
  spec.threads = threads;
  s->model = std::make_unique<GraphModel>(s->graph, tabulate_all(s->sys, s->graph, spec, extra ? extra(s->sys) : std::vector<Observable>{}),
                                          transmission_weights(s->sys, s->graph));
  return s;
}

AmbientInitLaw<2> planar_init(const InitSpec& init) {
  if (init.law == "point") return point_law<2>(vec2(init.point));
  if (init.law == "annulus") return annulus_law(vec2(init.center), init.r_in, init.r_out);
  return truncated_gaussian_law<2>(vec2(init.center), init.sd, init.radius);
}

AmbientInitLaw<3> spatial_init(const InitSpec& init) {
  if (init.law == "point") return point_law<3>(vec3(init.point));
  if (init.law == "gaussian") return truncated_gaussian_law<3>(vec3(init.center), init.sd, init.radius);
  throw Error(ErrorKind::ConfigError, "init.law " + init.law + " has no three-dimensional form");
}

GraphInitLaw projected_graph_law(const Projection& proj, const AmbientInitLaw<2>& init) {
  return [&proj, init](RandomStream& rng) {
    const GraphLocation loc = proj.classify(init(rng));
    if (loc.on_vertex()) throw Error(ErrorKind::InvalidArgument, "initial point lies on a critical level");
    return GraphState{loc.edge, loc.h};
  };
}

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ExperimentReport::distances_csv() const {
  std::string s = "kappa,time,tv,weighted_ks,combined,within_noise,n_ambient,n_limit\n";
  for (const auto& d : distances)
    s += num(d.kappa) + "," + num(d.time) + "," + num(d.tv) + "," + num(d.weighted_ks) + "," + num(d.combined) + "," +
         (d.within_noise ? "1" : "0") + "," + std::to_string(d.n_ambient) + "," + std::to_string(d.n_limit) + "\n";
  return s;
}

std::string ExperimentReport::laws_csv() const {
  std::string s = "series,source,kappa,time,n,mean,stderr,q05,q50,q95,excluded\n";
  for (const auto& l : laws) {
    const std::string series = std::isnan(l.kappa) ? l.source : l.source + " k=" + num(l.kappa);
    s += series + "," + l.source + "," + csv_kappa(l.kappa) + "," + num(l.time) + "," + std::to_string(l.summary.n) +
         "," + num(l.summary.mean) + "," + num(l.summary.stderr_mean) + "," + num(l.summary.q05) + "," +
         num(l.summary.q50) + "," + num(l.summary.q95) + "," + std::to_string(l.excluded) + "\n";
  }
  return s;
}

std::string ExperimentReport::pairs_csv() const {
  std::string s = "pair,kappa,time,ambient,ambient_se,limit,limit_se\n";
  for (const auto& p : pairs)
    s += p.pair + "," + num(p.kappa) + "," + num(p.time) + "," + num(p.ambient) + "," + num(p.ambient_se) + "," +
         num(p.limit) + "," + num(p.limit_se) + "\n";
  return s;
}

std::string ExperimentReport::report_json() const {
  json j;
  j["name"] = config.name;
  j["kind"] = to_string(config.kind);
  j["config_hash"] = config.hash();
  j["passed"] = passed();
  j["max_clamp"] = max_clamp;
  j["distances"] = json::array();
  for (const auto& d : distances)
    j["distances"].push_back({{"kappa", d.kappa}, {"time", d.time}, {"tv", d.tv}, {"weighted_ks", d.weighted_ks},
                              {"combined", d.combined}, {"within_noise", d.within_noise},
                              {"n_ambient", d.n_ambient}, {"n_limit", d.n_limit}});
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j.dump(2) + "\n";
}

std::string manifest_json(const ExperimentReport& rep, const std::vector<std::pair<std::string, std::string>>& files) {
  json j;
  j["name"] = rep.config.name;
  j["kind"] = to_string(rep.config.kind);
  j["config_hash"] = rep.config.hash();
  j["config"] = rep.config.canonical();
  j["seeds"] = {{"master", rep.config.seed}, {"noise", rep.config.noise.seed}};
  j["versions"] = {{"avlab", kVersion},
                   {"path_schema", kPathSchemaVersion},
                   {"compiler", __VERSION__},
                   {"boost", BOOST_LIB_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  j["outputs"] = json::object();
  for (const auto& [name, hash] : files) j["outputs"][name] = hash;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_manifest(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("manifest: ") + e.what());
  }
  if (!j.contains("config") || !j["config"].is_string()) throw Error(ErrorKind::ParseError, "manifest has no config");
  auto cfg = parse_config(j["config"].get<std::string>());
  if (j.contains("config_hash") && j["config_hash"] != cfg.hash())
    throw Error(ErrorKind::ConfigError, "manifest config does not match its hash");
  return cfg;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  ExperimentReport rep;
  rep.config = cfg;
  Outputs out(options.out.empty() ? cfg.output : options.out);
  auto flush_tables = [&] {
    out.put("distances.csv", rep.distances_csv());
    out.put("laws.csv", rep.laws_csv());
    if (cfg.kind == ExperimentKind::Flow) out.put("pairs.csv", rep.pairs_csv());
  };
  try {
    switch (cfg.kind) {
      case ExperimentKind::Averaging: run_averaging(cfg, options, rep, out); break;
      case ExperimentKind::Book: run_book(cfg, options, rep, out); break;
      case ExperimentKind::Flow: run_flow(cfg, options, rep, out); break;
    }
  } catch (const Error& e) {
    if (out.enabled()) {
      flush_tables();
      json j{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"config_hash", cfg.hash()}};
      out.put("error.json", j.dump(2) + "\n", false);
    }
    throw;
  }
  if (out.enabled()) {
    flush_tables();
    render_plots(rep, out);
    out.put("report.json", rep.report_json());
    out.put("manifest.json", manifest_json(rep, out.files()), false);
  }
  return rep;
}

ReplayResult replay_manifest(const std::string& manifest_text, const RunOptions& options) {
  const auto cfg = config_from_manifest(manifest_text);
  const json recorded = json::parse(manifest_text)["outputs"];
  RunOptions opt = options;
  if (opt.out.empty() || opt.out == "-") throw Error(ErrorKind::InvalidArgument, "replay needs an output directory");
  run_experiment(cfg, opt);
  ReplayResult r;
  const json fresh = json::parse(Outputs(opt.out).get("manifest.json"))["outputs"];
  for (const auto& [name, hash] : recorded.items())
    if (!fresh.contains(name) || fresh[name] != hash) r.mismatched.push_back(name);
  for (const auto& [name, hash] : fresh.items())
    if (!recorded.contains(name)) r.mismatched.push_back(name);
  r.identical = r.mismatched.empty();
  return r;
}

}  // namespace avlab
