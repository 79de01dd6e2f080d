#include "avlab/bench/path_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "avlab/common/error.hpp"

namespace avlab {

namespace {

constexpr char kMagic[4] = {'A', 'V', 'L', 'P'};

template <class U>
void put(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) { put(out, std::bit_cast<std::uint64_t>(x)); }
void put_i32(std::string& out, std::int32_t x) { put(out, static_cast<std::uint32_t>(x)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : b_(bytes) {}

  template <class U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::int32_t i32() { return static_cast<std::int32_t>(get<std::uint32_t>()); }
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Error(ErrorKind::ParseError, "path file truncated");
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_paths(const Ensemble& ens) {
  const std::size_t k = ens.times.size();
  std::string out;
  out.reserve(28 + 8 * k + ens.paths.size() * (1 + 20 * k));
  out.append(kMagic, 4);
  put(out, kPathSchemaVersion);
  put(out, static_cast<std::uint32_t>(ens.kind));
  put(out, static_cast<std::uint64_t>(k));
  put(out, static_cast<std::uint64_t>(ens.paths.size()));
  for (double t : ens.times) put_f64(out, t);
  for (const auto& p : ens.paths) {
    if (p.label.size() != k || p.c1.size() != k || p.c2.size() != k)
      throw Error(ErrorKind::InvalidArgument, "path record does not match the time grid");
    out.push_back(static_cast<char>(p.flag));
    for (auto l : p.label) put_i32(out, l);
    for (double x : p.c1) put_f64(out, x);
    for (double x : p.c2) put_f64(out, x);
  }
  return out;
}

Ensemble decode_paths(const std::string& bytes) {
  Reader r(bytes);
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorKind::ParseError, "not a path file");
  r.skip(4);
  const auto version = r.get<std::uint32_t>();
  if (version != kPathSchemaVersion)
    throw Error(ErrorKind::ParseError, "unsupported path schema version " + std::to_string(version));
  Ensemble ens;
  ens.kind = static_cast<PathKind>(r.get<std::uint32_t>());
  const auto k = r.get<std::uint64_t>();
  const auto n = r.get<std::uint64_t>();
  if (k > r.remaining() / 8) throw Error(ErrorKind::ParseError, "path file truncated");
  ens.times.resize(k);
  for (auto& t : ens.times) t = r.f64();
  if (n > 0 && (r.remaining() / n != 1 + 20 * k || r.remaining() % n != 0))
    throw Error(ErrorKind::ParseError, "path file size does not match its header");
  ens.paths.resize(n);
  for (auto& p : ens.paths) {
    p.resize(k);
    p.flag = r.get<std::uint8_t>();
    for (auto& l : p.label) l = r.i32();
    for (auto& x : p.c1) x = r.f64();
    for (auto& x : p.c2) x = r.f64();
  }
  if (r.remaining() != 0) throw Error(ErrorKind::ParseError, "trailing bytes in path file");
  return ens;
}

void write_paths(const std::string& file, const Ensemble& ens) {
  std::ofstream out(file, std::ios::binary);
  const auto bytes = encode_paths(ens);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + file);
}

Ensemble read_paths(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + file);
  std::ostringstream s;
  s << in.rdbuf();
  return decode_paths(s.str());
}

std::string marginals_csv(const Ensemble& ens) {
  std::ostringstream out;
  out.precision(17);
  out << "time,path,label,c1,c2\n";
  for (std::size_t k = 0; k < ens.times.size(); ++k)
    for (std::size_t i = 0; i < ens.paths.size(); ++i) {
      const auto& p = ens.paths[i];
      if (!p.ok()) continue;
      out << ens.times[k] << ',' << i << ',' << p.label[k] << ',' << p.c1[k] << ',' << p.c2[k] << '\n';
    }
  return out.str();
}

bool identical(const Ensemble& a, const Ensemble& b) { return encode_paths(a) == encode_paths(b); }

}  // namespace avlab
