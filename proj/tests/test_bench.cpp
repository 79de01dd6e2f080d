#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "avlab/bench/config.hpp"
#include "avlab/bench/experiment.hpp"
#include "avlab/bench/path_file.hpp"
#include "avlab/bench/svg_plot.hpp"
#include "avlab/bench/validate.hpp"
#include "avlab/common/error.hpp"

using namespace avlab;
namespace fs = std::filesystem;

namespace {

Ensemble sample_ensemble() {
  Ensemble e;
  e.kind = PathKind::Book;
  e.times = {0.25, 1.0};
  e.paths.resize(3);
  for (std::size_t i = 0; i < 3; ++i) {
    e.paths[i].resize(2);
    for (std::size_t k = 0; k < 2; ++k) {
      e.paths[i].label[k] = static_cast<std::int32_t>(i) - 1;
      e.paths[i].c1[k] = 0.1 * i + k + 1e-17;
      e.paths[i].c2[k] = -std::ldexp(1.0, -1070) * (i + 1);
    }
  }
  e.paths[1].mark(ErrorKind::OutOfDomain);
  return e;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("avlab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kRadial = R"([experiment]
kind = averaging
name = radial

[model]
hamiltonian = radial-quadratic
box = 10

[init]
law = annulus
center = 0,0
r_in = 0.8
r_out = 1.6

[graph]
nodes = 48
truncation = 40

[run]
kappa = 0,10,100
times = 0.5,1
n_paths = 3000
seed = 3
dt = 0.01

[tolerance]
within_noise = true
)";

}  // namespace

TEST(PathFile, RoundTripIsBitIdentical) {
  const auto e = sample_ensemble();
  const auto bytes = encode_paths(e);
  const auto back = decode_paths(bytes);
  EXPECT_TRUE(identical(e, back));
  EXPECT_EQ(back.kind, PathKind::Book);
  EXPECT_EQ(back.paths[1].flag, e.paths[1].flag);
  EXPECT_EQ(back.paths[2].c2[1], e.paths[2].c2[1]);
  EXPECT_EQ(bytes.size(), 28u + 8 * 2 + 3 * (1 + 20 * 2));
}

TEST(PathFile, HeaderIsLittleEndian) {
  const auto bytes = encode_paths(sample_ensemble());
  EXPECT_EQ(bytes.substr(0, 4), "AVLP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kPathSchemaVersion);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), static_cast<unsigned>(PathKind::Book));
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 3);
  // 0.25 = 0x3FD0000000000000: the high byte comes last.
  EXPECT_EQ(static_cast<unsigned char>(bytes[28 + 7]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(bytes[28 + 6]), 0xd0);
  // Labels start right after the flag of the first record; path 0 has label −1.
  EXPECT_EQ(static_cast<unsigned char>(bytes[44 + 1]), 0xff);
}

TEST(PathFile, CorruptInputRejected) {
  auto bytes = encode_paths(sample_ensemble());
  auto expect_parse_error = [](const std::string& b) {
    try {
      decode_paths(b);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
  };
  expect_parse_error(bytes.substr(0, bytes.size() - 1));
  expect_parse_error(bytes + "x");
  expect_parse_error("AVLQ" + bytes.substr(4));
  auto v2 = bytes;
  v2[4] = 2;
  expect_parse_error(v2);
  expect_parse_error("");
}

TEST(PathFile, FileRoundTripAndEmptyEnsemble) {
  const auto dir = scratch("paths");
  fs::create_directories(dir);
  const auto e = sample_ensemble();
  write_paths((dir / "a.avlp").string(), e);
  EXPECT_TRUE(identical(read_paths((dir / "a.avlp").string()), e));
  Ensemble empty;
  empty.times = {1.0};
  EXPECT_TRUE(identical(decode_paths(encode_paths(empty)), empty));
  EXPECT_THROW(read_paths((dir / "missing.avlp").string()), Error);
}

TEST(PathFile, MarginalsSkipFlaggedPaths) {
  const auto csv = marginals_csv(sample_ensemble());
  const auto t = parse_csv(csv);
  EXPECT_EQ(t.header, (std::vector<std::string>{"time", "path", "label", "c1", "c2"}));
  EXPECT_EQ(t.rows.size(), 4u);
  for (std::size_t r = 0; r < t.rows.size(); ++r) EXPECT_NE(t.rows[r][1], "1");
  EXPECT_EQ(t.number(3, t.column("c1")), 0.2 + 1 + 1e-17);
}

TEST(Config, ParsesAndFillsDefaults) {
  const auto c = parse_config(kRadial);
  EXPECT_EQ(c.kind, ExperimentKind::Averaging);
  EXPECT_EQ(c.model.hamiltonian, "radial-quadratic");
  EXPECT_EQ(c.model.nu, 0.5);
  EXPECT_EQ(c.kappas, (std::vector<double>{0, 10, 100}));
  EXPECT_EQ(c.n_paths, 3000u);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_TRUE(c.within_noise);
  EXPECT_FALSE(c.monotone);
}

TEST(Config, CanonicalTextRoundTrips) {
  const auto c = parse_config(kRadial);
  const auto again = parse_config(c.canonical());
  EXPECT_EQ(again.canonical(), c.canonical());
  EXPECT_EQ(again.hash(), c.hash());
  EXPECT_EQ(c.hash().size(), 64u);
}

TEST(Config, HashTracksContentButNotOutput) {
  auto a = parse_config(kRadial);
  auto b = a;
  b.output = "elsewhere";
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 4;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Config, RejectsUnknownAndMalformedInput) {
  auto expect_config_error = [](const std::string& text) {
    try {
      parse_config(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigError) << text;
    }
  };
  expect_config_error("[experiment]\nkind = averaging\nspeed = 3\n");
  expect_config_error("[experiment]\nkind = averaging\n[extras]\nx = 1\n");
  expect_config_error("[model]\nnu = 0.5\n");
  expect_config_error("[experiment]\nkind = sideways\n");
  expect_config_error("[experiment]\nkind = averaging\n[model]\nnu = half\n");
  expect_config_error("[experiment]\nkind = averaging\n[model]\nnu = -1\n");
  expect_config_error("[experiment]\nkind = averaging\n[run]\ntimes = 1,0.5\n");
  expect_config_error("[experiment]\nkind = averaging\n[run]\nn_paths = 2.5\n");
  expect_config_error("[experiment]\nkind = averaging\n[tolerance]\nmonotone = yes\n");
  expect_config_error("[experiment]\nkind = averaging\n[model]\nnu = 1\nnu = 2\n");
  expect_config_error("[experiment]\nkind = book\n[init]\nlaw = point\npoint = 1,0\n");
  expect_config_error("[experiment]\nkind = flow\n");
}

TEST(Config, SchemaDocumentsEveryKey) {
  const auto schema = config_schema();
  const auto canonical = ExperimentConfig{}.canonical();
  std::istringstream in(canonical);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '[') continue;
    const auto key = line.substr(0, line.find(" = "));
    EXPECT_NE(schema.find("\n" + key + " = "), std::string::npos) << key;
  }
}

TEST(Config, FlowStartsParse) {
  const auto c = parse_config("[experiment]\nkind = flow\n[flow]\nstarts = 1.5,0;-2,0.5\n");
  ASSERT_EQ(c.starts.size(), 2u);
  EXPECT_EQ(c.starts[1], (std::vector<double>{-2, 0.5}));
  EXPECT_EQ(parse_config(c.canonical()).starts, c.starts);
}

TEST(Svg, OneMarkerPerRowAndOneLinePerSeries) {
  const std::string csv = "kappa,time,combined\n1,0.5,0.3\n10,0.5,0.1\n100,0.5,0.02\n1,1,0.2\n10,1,0.05\n100,1,0.01\n";
  PlotSpec spec;
  spec.x_column = "kappa";
  spec.y_column = "combined";
  spec.series_column = "time";
  spec.log_x = true;
  spec.reference = 0.05;
  const auto svg = render_svg(csv, spec);
  const auto count = [&](const std::string& tag) {
    std::size_t n = 0;
    for (auto p = svg.find(tag); p != std::string::npos; p = svg.find(tag, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("<circle"), 6u);
  EXPECT_EQ(count("<polyline"), 2u);
  EXPECT_EQ(count("stroke-dasharray"), 1u);
  EXPECT_NE(svg.find("time = 0.5"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>"), svg.size() - 7);
}

TEST(Svg, MarkersFollowTheCsvValues) {
  // With a linear axis the marker heights are an affine image of the values.
  const std::string csv = "x,y\n0,0\n1,2\n2,1\n3,4\n";
  PlotSpec spec;
  spec.x_column = "x";
  spec.y_column = "y";
  const auto svg = render_svg(csv, spec);
  std::regex circle("<circle cx=\"([-0-9.e]+)\" cy=\"([-0-9.e]+)\"");
  std::vector<double> cy;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator(); ++it)
    cy.push_back(std::stod((*it)[2]));
  ASSERT_EQ(cy.size(), 4u);
  const double scale = (cy[1] - cy[0]) / 2.0;
  EXPECT_NEAR(cy[2] - cy[0], 1.0 * scale, 1e-3);
  EXPECT_NEAR(cy[3] - cy[0], 4.0 * scale, 1e-3);
  EXPECT_LT(scale, 0.0);
  EXPECT_THROW(render_svg("x,z\n1,2\n", spec), Error);
}

TEST(Experiment, EmptySweepReportsOnlyTheLimitLaw) {
  auto c = parse_config(kRadial);
  c.kappas.clear();
  c.n_paths = 500;
  const auto dir = scratch("empty_sweep");
  RunOptions opt;
  opt.out = dir.string();
  const auto rep = run_experiment(c, opt);
  EXPECT_TRUE(rep.distances.empty());
  ASSERT_EQ(rep.laws.size(), 2u);
  for (const auto& l : rep.laws) EXPECT_EQ(l.source, "limit");
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "laws.svg"));
  EXPECT_FALSE(fs::exists(dir / "convergence.svg"));
  EXPECT_EQ(parse_csv(read(dir / "distances.csv")).rows.size(), 0u);
}

TEST(Experiment, RadialDistanceFlatInKappa) {
  const auto c = parse_config(kRadial);
  RunOptions opt;
  opt.out = "-";
  const auto rep = run_experiment(c, opt);
  ASSERT_EQ(rep.distances.size(), 6u);
  for (const auto& d : rep.distances) {
    EXPECT_TRUE(d.within_noise) << d.kappa << " " << d.time << " " << d.combined;
    EXPECT_EQ(d.tv, 0.0);
    EXPECT_EQ(d.n_ambient, 3000u);
  }
  EXPECT_TRUE(rep.passed());
}

TEST(Experiment, PlotsAreRenderedFromTheEmittedCsv) {
  auto c = parse_config(kRadial);
  c.n_paths = 300;
  c.max_distance = 0.5;
  const auto dir = scratch("plots");
  RunOptions opt;
  opt.out = dir.string();
  run_experiment(c, opt);
  PlotSpec spec;
  spec.title = "radial: ambient vs limit";
  spec.x_column = "kappa";
  spec.y_column = "combined";
  spec.series_column = "time";
  spec.x_label = "kappa";
  spec.y_label = "combined distance";
  spec.reference = 0.5;
  EXPECT_EQ(read(dir / "convergence.svg"), render_svg(read(dir / "distances.csv"), spec));
  const auto t = parse_csv(read(dir / "distances.csv"));
  EXPECT_EQ(t.rows.size(), 6u);
}

TEST(Experiment, ManifestReplaysBitIdenticallyAcrossThreadCounts) {
  auto c = parse_config(kRadial);
  c.n_paths = 400;
  c.kappas = {10};
  const auto first = scratch("replay_a"), second = scratch("replay_b");
  RunOptions opt;
  opt.out = first.string();
  opt.threads = 1;
  opt.write_paths = true;
  run_experiment(c, opt);
  const auto manifest = read(first / "manifest.json");
  const auto j = nlohmann::json::parse(manifest);
  EXPECT_EQ(j["config_hash"], c.hash());
  EXPECT_TRUE(j["outputs"].contains("limit.avlp"));
  EXPECT_TRUE(j["outputs"].contains("ambient_k10.avlp"));

  RunOptions again = opt;
  again.out = second.string();
  again.threads = 3;
  const auto r = replay_manifest(manifest, again);
  EXPECT_TRUE(r.identical);
  EXPECT_EQ(read(first / "distances.csv"), read(second / "distances.csv"));
  EXPECT_EQ(read(first / "limit.avlp"), read(second / "limit.avlp"));

  auto tampered = j;
  tampered["outputs"]["laws.csv"] = std::string(64, '0');
  const auto bad = replay_manifest(tampered.dump(), again);
  EXPECT_FALSE(bad.identical);
  EXPECT_EQ(bad.mismatched, (std::vector<std::string>{"laws.csv"}));
}

TEST(Experiment, ManifestWithAlteredConfigRejected) {
  auto c = parse_config(kRadial);
  nlohmann::json j{{"config", c.canonical()}, {"config_hash", std::string(64, 'a')}};
  EXPECT_THROW(config_from_manifest(j.dump()), Error);
  EXPECT_EQ(config_from_manifest(nlohmann::json{{"config", c.canonical()}}.dump()).hash(), c.hash());
}

TEST(Experiment, FatalErrorLeavesDiagnostic) {
  auto c = parse_config(kRadial);
  c.init.law = "point";
  c.init.point = {0.0, 0.0};  // the minimum: a vertex, not an edge point
  c.n_paths = 10;
  const auto dir = scratch("fatal");
  RunOptions opt;
  opt.out = dir.string();
  EXPECT_THROW(run_experiment(c, opt), Error);
  ASSERT_TRUE(fs::exists(dir / "error.json"));
  const auto j = nlohmann::json::parse(read(dir / "error.json"));
  // Every path is flagged at its start, so no clean sample remains.
  EXPECT_EQ(j["kind"], "EmptyLaw");
  EXPECT_TRUE(fs::exists(dir / "distances.csv"));
}

TEST(Experiment, BookSweepRuns) {
  auto c = parse_config(
      "[experiment]\nkind = book\n[init]\nlaw = gaussian\ncenter = 0,0,0\nsd = 0.6\nradius = 2\n"
      "[run]\nkappa = 10\ntimes = 0.2\nn_paths = 300\nseed = 2\n[tolerance]\npage_uniformity = true\n");
  RunOptions opt;
  opt.out = "-";
  const auto rep = run_experiment(c, opt);
  ASSERT_EQ(rep.distances.size(), 1u);
  EXPECT_GT(rep.distances[0].n_ambient, 290u);
  EXPECT_LT(rep.distances[0].combined, 0.3);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_EQ(rep.checks[0].name.rfind("page_uniformity", 0), 0u);
}

TEST(Validate, AllClosedFormChecksPass) {
  const auto checks = run_validations(1);
  EXPECT_GE(checks.size(), 20u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Config, ShippedConfigsLoad) {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(AVLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    const auto c = load_config(entry.path().string());
    EXPECT_EQ(parse_config(c.canonical()).hash(), c.hash()) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 4u);
}
