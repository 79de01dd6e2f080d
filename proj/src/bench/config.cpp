#include "avlab/bench/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "avlab/common/error.hpp"

namespace avlab {

namespace {

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  const auto t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error(ErrorKind::ConfigError, key + ": not a number: '" + v + "'");
  return x;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error(ErrorKind::ConfigError, key + ": not a non-negative integer: '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

std::string from_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "true") return true;
  if (t == "false") return false;
  throw Error(ErrorKind::ConfigError, key + ": expected true or false, got '" + v + "'");
}

ExperimentKind to_kind(const std::string& v) {
  const auto t = trim(v);
  if (t == "averaging") return ExperimentKind::Averaging;
  if (t == "book") return ExperimentKind::Book;
  if (t == "flow") return ExperimentKind::Flow;
  throw Error(ErrorKind::ConfigError, "experiment.kind: unknown kind '" + v + "'");
}

struct Field {
  std::string section, key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  std::string help;
};

#define AVLAB_DOUBLE(sec, name, member, help)                                                      \
  Field {                                                                                           \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_double(sec "." name, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.member); }, help                               \
  }
#define AVLAB_STRING(sec, name, member, help)                                                     \
  Field {                                                                                          \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = trim(v); },              \
        [](const ExperimentConfig& c) { return c.member; }, help                                   \
  }
#define AVLAB_LIST(sec, name, member, help)                                                       \
  Field {                                                                                          \
    sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_list(sec "." name, v); }, \
        [](const ExperimentConfig& c) { return from_list(c.member); }, help                        \
  }
#define AVLAB_COUNT(sec, name, member, type, help)                                                           \
  Field {                                                                                                     \
    sec, name,                                                                                                \
        [](ExperimentConfig& c, const std::string& v) { c.member = static_cast<type>(to_count(sec "." name, v)); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }, help                              \
  }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      Field{"experiment", "kind", [](ExperimentConfig& c, const std::string& v) { c.kind = to_kind(v); },
            [](const ExperimentConfig& c) { return to_string(c.kind); }, "averaging | book | flow (required)"},
      AVLAB_STRING("experiment", "name", name, "label used in the report"),
      AVLAB_STRING("experiment", "output", output, "output directory (overridden by --out)"),

      AVLAB_STRING("model", "hamiltonian", model.hamiltonian, "radial-quadratic | duffing-well | expression in x1, x2"),
      AVLAB_DOUBLE("model", "nu", model.nu, "diffusivity ν of the planar model"),
      AVLAB_DOUBLE("model", "box", model.box, "half width of the square domain"),
      AVLAB_STRING("model", "drift", model.drift, "zero | restoring"),
      AVLAB_DOUBLE("model", "drift_rate", model.drift_rate, "rate of the restoring drift −rate·x"),
      AVLAB_DOUBLE("model", "confinement", model.confinement, "book: exponent α of 𝒲 = (1 + |x|²)^α"),

      AVLAB_STRING("init", "law", init.law, "point | annulus | gaussian"),
      AVLAB_LIST("init", "point", init.point, "point mass location (2 or 3 coordinates)"),
      AVLAB_LIST("init", "center", init.center, "annulus or gaussian center"),
      AVLAB_DOUBLE("init", "r_in", init.r_in, "annulus inner radius"),
      AVLAB_DOUBLE("init", "r_out", init.r_out, "annulus outer radius"),
      AVLAB_DOUBLE("init", "sd", init.sd, "gaussian standard deviation"),
      AVLAB_DOUBLE("init", "radius", init.radius, "gaussian truncation radius"),

      AVLAB_COUNT("graph", "nodes", nodes, int, "coefficient table nodes per edge"),
      AVLAB_DOUBLE("graph", "truncation", truncation, "upper level of the unbounded edge; ambient paths above it are flagged"),

      AVLAB_LIST("run", "kappa", kappas, "κ sweep, may be empty"),
      AVLAB_LIST("run", "times", times, "observation times, increasing"),
      AVLAB_COUNT("run", "n_paths", n_paths, std::size_t, "paths per ensemble"),
      AVLAB_COUNT("run", "seed", seed, std::uint64_t, "master seed"),
      AVLAB_DOUBLE("run", "dt", dt, "time step of every simulator"),

      AVLAB_DOUBLE("tolerance", "max_distance", max_distance, "combined distance bound at the largest κ (0 = off)"),
      Field{"tolerance", "monotone", [](ExperimentConfig& c, const std::string& v) { c.monotone = to_bool("tolerance.monotone", v); },
            [](const ExperimentConfig& c) { return std::string(c.monotone ? "true" : "false"); },
            "require distances to decrease along the κ sweep"},
      Field{"tolerance", "within_noise",
            [](ExperimentConfig& c, const std::string& v) { c.within_noise = to_bool("tolerance.within_noise", v); },
            [](const ExperimentConfig& c) { return std::string(c.within_noise ? "true" : "false"); },
            "require every per-label KS statistic below its 99% threshold"},
      Field{"tolerance", "page_uniformity",
            [](ExperimentConfig& c, const std::string& v) { c.page_uniformity = to_bool("tolerance.page_uniformity", v); },
            [](const ExperimentConfig& c) { return std::string(c.page_uniformity ? "true" : "false"); },
            "book: χ² test of uniform page occupation at the last time"},
      AVLAB_DOUBLE("tolerance", "mc_sigmas", mc_sigmas, "Monte-Carlo agreement width in standard errors"),
      AVLAB_DOUBLE("tolerance", "clamp", clamp_tol, "largest accepted eigenvalue clamp of step covariances"),

      AVLAB_COUNT("noise", "modes", noise.modes, int, "number of Fourier modes"),
      AVLAB_DOUBLE("noise", "k_min", noise.k_min, "smallest wavenumber"),
      AVLAB_DOUBLE("noise", "k_max", noise.k_max, "largest wavenumber"),
      AVLAB_DOUBLE("noise", "amplitude", noise.amplitude, "total amplitude √Σa²"),
      AVLAB_DOUBLE("noise", "fraction", noise_fraction, "amplitude as a fraction of the δ-admissible maximum (0 = use amplitude)"),
      AVLAB_DOUBLE("noise", "delta", noise.delta, "pure-diffusion margin δ"),
      AVLAB_COUNT("noise", "seed", noise.seed, std::uint64_t, "seed of the mode draw"),
      Field{"noise", "compressible", [](ExperimentConfig& c, const std::string& v) { c.noise.compressible = to_bool("noise.compressible", v); },
            [](const ExperimentConfig& c) { return std::string(c.noise.compressible ? "true" : "false"); },
            "curl-free modes instead of divergence-free ones"},

      Field{"flow", "starts",
            [](ExperimentConfig& c, const std::string& v) {
              c.starts.clear();
              for (const auto& p : split(v, ';')) {
                auto xy = to_list("flow.starts", p);
                if (xy.size() != 2) throw Error(ErrorKind::ConfigError, "flow.starts: each start needs two coordinates");
                c.starts.push_back(xy);
              }
            },
            [](const ExperimentConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.starts.size(); ++i) out += (i ? ";" : "") + from_list(c.starts[i]);
              return out;
            },
            "particle starting points x1,x2;x1,x2;..."},
      AVLAB_COUNT("flow", "correlation_samples", correlation_samples, std::size_t, "increments sampled for the correlation check"),
  };
  return fields;
}

#undef AVLAB_DOUBLE
#undef AVLAB_STRING
#undef AVLAB_LIST
#undef AVLAB_COUNT

void check(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigError, what); };
  if (!(c.model.nu > 0)) fail("model.nu must be positive");
  if (!(c.model.box > 0)) fail("model.box must be positive");
  if (c.model.drift != "zero" && c.model.drift != "restoring") fail("model.drift must be zero or restoring");
  if (c.init.law != "point" && c.init.law != "annulus" && c.init.law != "gaussian") fail("init.law must be point, annulus or gaussian");
  if (c.init.law == "annulus" && !(c.init.r_in >= 0 && c.init.r_out > c.init.r_in)) fail("init: need 0 ≤ r_in < r_out");
  if (c.init.law == "gaussian" && !(c.init.sd > 0 && c.init.radius > 0)) fail("init: sd and radius must be positive");
  const std::size_t dim = c.kind == ExperimentKind::Book ? 3 : 2;
  if (c.init.law == "point" && c.init.point.size() != dim) fail("init.point needs " + std::to_string(dim) + " coordinates");
  if (c.init.law != "point" && c.init.center.size() != (c.init.law == "annulus" ? 2 : dim))
    fail("init.center has the wrong number of coordinates");
  if (c.nodes < 8) fail("graph.nodes must be at least 8");
  if (!(c.truncation > 0)) fail("graph.truncation must be positive");
  if (c.times.empty()) fail("run.times must not be empty");
  for (std::size_t i = 0; i < c.times.size(); ++i)
    if (!(c.times[i] >= 0) || (i > 0 && !(c.times[i] > c.times[i - 1]))) fail("run.times must be increasing and non-negative");
  for (double k : c.kappas)
    if (!(k >= 0)) fail("run.kappa values must be non-negative");
  if (!(c.dt > 0)) fail("run.dt must be positive");
  if (!(c.mc_sigmas > 0)) fail("tolerance.mc_sigmas must be positive");
  if (c.kind == ExperimentKind::Flow) {
    if (c.starts.empty()) fail("flow.starts must list at least one particle");
    if (c.starts.size() > 8) fail("flow.starts: at most 8 particles");
    if (!(c.noise.delta > 0 && c.noise.delta <= 1)) fail("noise.delta must lie in (0, 1]");
    if (c.noise.modes < 1) fail("noise.modes must be at least 1");
    if (!(c.noise_fraction >= 0 && c.noise_fraction <= 1)) fail("noise.fraction must lie in [0, 1]");
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Averaging: return "averaging";
    case ExperimentKind::Book: return "book";
    case ExperimentKind::Flow: return "flow";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  std::set<std::string> known_sections;
  for (const auto& f : schema()) known_sections.insert(f.section);
  ExperimentConfig cfg;
  bool has_kind = false;
  for (const auto& [section, body] : tree) {
    if (!known_sections.count(section)) throw Error(ErrorKind::ConfigError, "unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw Error(ErrorKind::ConfigError, "key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const auto it = std::find_if(schema().begin(), schema().end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == schema().end()) throw Error(ErrorKind::ConfigError, "unknown key " + section + "." + key);
      it->set(cfg, value.data());
      has_kind |= section == "experiment" && key == "kind";
    }
  }
  if (!has_kind) throw Error(ErrorKind::ConfigError, "missing experiment.kind");
  check(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + file);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string ExperimentConfig::canonical() const {
  std::string out, section;
  for (const auto& f : schema()) {
    if (f.section != section) {
      out += (section.empty() ? "" : "\n") + ("[" + f.section + "]\n");
      section = f.section;
    }
    out += f.key + " = " + f.get(*this) + "\n";
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::IoError, "hashing failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  ExperimentConfig c = *this;
  c.output.clear();
  return sha256_hex(c.canonical());
}

std::string config_schema() {
  std::string out, section;
  const ExperimentConfig defaults;
  for (const auto& f : schema()) {
    if (f.section != section) {
      out += (section.empty() ? "" : "\n") + ("[" + f.section + "]\n");
      section = f.section;
    }
    out += f.key + " = " + f.get(defaults) + "    ; " + f.help + "\n";
  }
  return out;
}

}  // namespace avlab
