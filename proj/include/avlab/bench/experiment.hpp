#pragma once

#include <memory>
#include <string>
#include <vector>

#include "avlab/ambient/ambient.hpp"
#include "avlab/bench/config.hpp"
#include "avlab/bench/statistics.hpp"
#include "avlab/graphsim/graph_simulator.hpp"

namespace avlab {

HamiltonianSystem2D make_system(const ModelSpec& model);

/// A planar model with its Reeb graph, projection and limiting graph model.
struct PlanarSetup {
  explicit PlanarSetup(HamiltonianSystem2D s) : sys(std::move(s)) {}
  HamiltonianSystem2D sys;
  MetricGraph graph;
  std::unique_ptr<Projection> projection;
  std::unique_ptr<GraphModel> model;
};

/// Extra orbit averages to tabulate, built against the setup's own system.
using ObservableFactory = std::function<std::vector<Observable>(const HamiltonianSystem2D&)>;

std::unique_ptr<PlanarSetup> build_planar(const ExperimentConfig& cfg, unsigned threads = 1,
                                          const ObservableFactory& extra = nullptr);

AmbientInitLaw<2> planar_init(const InitSpec& init);
AmbientInitLaw<3> spatial_init(const InitSpec& init);

/// Pushforward of an ambient law through π, drawing from the same stream.
GraphInitLaw projected_graph_law(const Projection& proj, const AmbientInitLaw<2>& init);

struct DistanceRow {
  double kappa = 0, time = 0;
  double tv = 0, weighted_ks = 0, combined = 0;
  /// Every per-label KS statistic below its 99% threshold.
  bool within_noise = false;
  std::size_t n_ambient = 0, n_limit = 0;
};

/// Summary of the scalar coordinate of one ensemble at one time. κ is NaN
/// for the limit ensemble.
struct LawRow {
  std::string source;
  double kappa = 0, time = 0;
  Summary summary;
  std::size_t excluded = 0;
};

/// E[f(Y¹)g(Y²)] on both sides of one κ.
struct PairRow {
  std::string pair;
  double kappa = 0, time = 0;
  double ambient = 0, ambient_se = 0, limit = 0, limit_se = 0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<DistanceRow> distances;
  std::vector<LawRow> laws;
  std::vector<PairRow> pairs;
  std::vector<CheckResult> checks;
  double max_clamp = 0;

  bool passed() const;
  std::string distances_csv() const;
  std::string laws_csv() const;
  std::string pairs_csv() const;
  std::string report_json() const;
};

struct RunOptions {
  unsigned threads = 1;
  /// Output directory; empty uses config.output, "-" writes nothing.
  std::string out;
  /// Also write every ensemble as a path file with CSV marginals.
  bool write_paths = false;
};

/// Runs the κ sweep and the limit simulation of the configured kind, then
/// writes manifest.json, report.json, the CSV tables and SVG plots rendered
/// from those CSV files. On a fatal error, error.json and the tables built
/// so far are written before rethrowing.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

std::string manifest_json(const ExperimentReport& report, const std::vector<std::pair<std::string, std::string>>& files);
ExperimentConfig config_from_manifest(const std::string& manifest_text);

struct ReplayResult {
  bool identical = false;
  std::vector<std::string> mismatched;
};

/// Reruns the manifest's configuration into `options.out` and compares the
/// hash of every recorded output file.
ReplayResult replay_manifest(const std::string& manifest_text, const RunOptions& options);

}  // namespace avlab
