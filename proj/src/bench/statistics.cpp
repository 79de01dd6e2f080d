#include "avlab/bench/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "avlab/common/error.hpp"

namespace avlab {

namespace {

void require_nonempty(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw Error(ErrorKind::EmptyLaw, "empirical law has no samples");
}

std::vector<double> sorted(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

double quantile(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= s.size()) return s.back();
  return s[i] + (pos - static_cast<double>(i)) * (s[i + 1] - s[i]);
}

}  // namespace

double ks_threshold_99(std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(0.005) / 2.0);
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

KsResult ks_distance(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a.size(), b.size());
  const auto sa = sorted(a), sb = sorted(b);
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_threshold_99(sa.size(), sb.size())};
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a.size(), b.size());
  const auto sa = sorted(a), sb = sorted(b);
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  // ∫|F_a − F_b| over the merged breakpoints.
  std::size_t i = 0, j = 0;
  double x = std::min(sa.front(), sb.front()), w = 0.0;
  while (i < sa.size() || j < sb.size()) {
    const double next = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    w += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - x);
    x = next;
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
  }
  return w;
}

double total_variation(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  require_nonempty(a.size(), b.size());
  std::map<std::int32_t, std::pair<std::size_t, std::size_t>> counts;
  for (auto l : a) ++counts[l].first;
  for (auto l : b) ++counts[l].second;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double tv = 0.0;
  for (const auto& [l, c] : counts)
    tv += std::abs(static_cast<double>(c.first) / na - static_cast<double>(c.second) / nb);
  return 0.5 * tv;
}

Summary summarize(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::EmptyLaw, "empirical law has no samples");
  Summary s;
  s.n = x.size();
  double m = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - m;
    m += d / static_cast<double>(i + 1);
    m2 += d * (x[i] - m);
  }
  s.mean = m;
  s.stderr_mean = x.size() > 1 ? std::sqrt(m2 / static_cast<double>(x.size() - 1) / static_cast<double>(x.size())) : 0.0;
  const auto srt = sorted(x);
  s.q05 = quantile(srt, 0.05);
  s.q50 = quantile(srt, 0.5);
  s.q95 = quantile(srt, 0.95);
  return s;
}

EmpiricalLaw EmpiricalLaw::from_ensemble(const Ensemble& ens, Coordinate coord) {
  EmpiricalLaw law;
  law.observable = coord == Coordinate::First ? "c1" : "c2";
  law.times = ens.times;
  law.values_.resize(ens.times.size());
  law.labels_.resize(ens.times.size());
  for (const auto& p : ens.paths) {
    if (!p.ok()) {
      ++law.excluded;
      continue;
    }
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      law.values_[k].push_back(coord == Coordinate::First ? p.c1[k] : p.c2[k]);
      law.labels_[k].push_back(p.label[k]);
    }
  }
  return law;
}

std::vector<double> EmpiricalLaw::values_with_label(std::size_t k, std::int32_t label) const {
  std::vector<double> out;
  const auto& v = values_.at(k);
  const auto& l = labels_.at(k);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (l[i] == label) out.push_back(v[i]);
  return out;
}

KsResult ks_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, std::size_t k) {
  return ks_distance(a.values(k), b.values(k));
}

double wasserstein1(const EmpiricalLaw& a, const EmpiricalLaw& b, std::size_t k) {
  return wasserstein1(a.values(k), b.values(k));
}

GraphDistance graph_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, std::size_t k) {
  require_nonempty(a.size(), b.size());
  GraphDistance g;
  g.tv = total_variation(a.labels(k), b.labels(k));
  std::set<std::int32_t> labels(a.labels(k).begin(), a.labels(k).end());
  labels.insert(b.labels(k).begin(), b.labels(k).end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  for (auto l : labels) {
    if (l < 0) continue;
    const auto va = a.values_with_label(k, l), vb = b.values_with_label(k, l);
    const double w = 0.5 * (static_cast<double>(va.size()) / na + static_cast<double>(vb.size()) / nb);
    KsResult r;
    if (va.empty() || vb.empty())
      r = {1.0, 0.0};
    else
      r = ks_distance(va, vb);
    g.per_label[l] = r;
    g.weighted_ks += w * r.statistic;
  }
  g.combined = std::max(g.tv, g.weighted_ks);
  return g;
}

}  // namespace avlab
