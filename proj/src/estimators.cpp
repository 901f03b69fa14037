#include "rbody/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rbody {

namespace {

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size(), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// Split every chain into equal batches; returns (batch means, batch lengths).
std::vector<std::pair<size_t, size_t>> batch_ranges(size_t len, int batches) {
  std::vector<std::pair<size_t, size_t>> r;
  size_t b = std::max<size_t>(1, len / batches);
  for (int k = 0; k < batches && (k + 1) * b <= len; ++k) r.push_back({k * b, (k + 1) * b});
  return r;
}

}  // namespace

BatchStats batch_means(const std::vector<std::vector<double>>& chains, int batches) {
  BatchStats st;
  std::vector<double> means, all;
  const int per = std::max(2, batches / std::max<int>(1, chains.size()));
  for (const auto& c : chains) {
    for (auto [a, b] : batch_ranges(c.size(), per)) {
      double s = 0.0;
      for (size_t i = a; i < b; ++i) s += c[i];
      means.push_back(s / (b - a));
    }
    all.insert(all.end(), c.begin(), c.end());
  }
  st.n = static_cast<long>(all.size());
  if (all.empty()) return st;
  st.mean = std::accumulate(all.begin(), all.end(), 0.0) / all.size();
  if (means.size() < 2) return st;
  double vb = variance(means);
  st.se = std::sqrt(vb / means.size());
  double vx = variance(all);
  st.ess = st.se > 0.0 ? std::min<double>(st.n, vx / (st.se * st.se)) : static_cast<double>(st.n);
  return st;
}

BatchStats batch_means(const std::vector<double>& series, int batches) {
  return batch_means(std::vector<std::vector<double>>{series}, batches);
}

void EstimatorReport::compare(cplx t) {
  target = t;
  z = se > 0.0 ? std::abs(estimate - t) / se : std::numeric_limits<double>::infinity();
}

std::vector<Observable> probe_observables(const std::vector<cplx>& probes) {
  std::vector<Observable> o;
  for (cplx x : probes) o.push_back([x](double l) { return 1.0 / (x - l); });
  return o;
}

void check_probes(const Domain& d, const std::vector<cplx>& probes, double min_distance) {
  for (cplx x : probes)
    for (const auto& s : d.segments) {
      double dx = std::max({s.lo - x.real(), 0.0, x.real() - s.hi});
      if (std::hypot(dx, x.imag()) < min_distance)
        throw domain_error("probe point closer than " + std::to_string(min_distance) + " to the domain");
    }
}

std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  for (auto p : set_partitions(n - 1)) {
    for (size_t b = 0; b < p.size(); ++b) {
      auto q = p;
      q[b].push_back(n - 1);
      out.push_back(q);
    }
    p.push_back({n - 1});
    out.push_back(p);
  }
  return out;
}

CorrelatorEstimate estimate_correlators(const SampleResult& res, int first, const std::vector<cplx>& probes,
                                        const Domain& d, int batches) {
  check_probes(d, probes);
  const int n = static_cast<int>(probes.size());
  if (n < 1 || n > 6) throw config_error("correlator order must be between 1 and 6");
  const int S = 1 << n;
  // batch sums of prod_{j in subset} psi_j, subsets as bitmasks
  std::vector<std::vector<cplx>> bsum;
  std::vector<double> blen;
  const int per = std::max(2, batches / std::max<int>(1, res.chains.size()));
  for (const auto& c : res.chains) {
    for (auto [a, b] : batch_ranges(c.samples.size(), per)) {
      std::vector<cplx> m(S, 0.0);
      for (size_t i = a; i < b; ++i) {
        const auto& v = c.samples[i];
        for (int mask = 0; mask < S; ++mask) {
          cplx p = 1.0;
          for (int j = 0; j < n; ++j)
            if (mask >> j & 1) p *= v[first + j];
          m[mask] += p;
        }
      }
      bsum.push_back(m);
      blen.push_back(static_cast<double>(b - a));
    }
  }
  const int B = static_cast<int>(bsum.size());
  if (B < 2) throw numerical_error("correlator estimate: not enough samples for batching");
  const auto parts = set_partitions(n);
  std::vector<double> fact(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;

  auto estimates = [&](int skip) {
    std::vector<cplx> m(S, 0.0);
    double len = 0.0;
    for (int b = 0; b < B; ++b) {
      if (b == skip) continue;
      for (int k = 0; k < S; ++k) m[k] += bsum[b][k];
      len += blen[b];
    }
    for (auto& v : m) v /= len;
    cplx conn = 0.0;
    for (const auto& p : parts) {
      cplx t = ((p.size() - 1) % 2 ? -1.0 : 1.0) * fact[p.size() - 1];
      for (const auto& blk : p) {
        int mask = 0;
        for (int j : blk) mask |= 1 << j;
        t *= m[mask];
      }
      conn += t;
    }
    return std::pair<cplx, cplx>{m[S - 1], conn};
  };

  CorrelatorEstimate out;
  auto full = estimates(-1);
  std::vector<std::pair<cplx, cplx>> jk(B);
  std::pair<cplx, cplx> avg{0.0, 0.0};
  for (int b = 0; b < B; ++b) {
    jk[b] = estimates(b);
    avg.first += jk[b].first / double(B);
    avg.second += jk[b].second / double(B);
  }
  double v1 = 0.0, v2 = 0.0;
  for (const auto& e : jk) {
    v1 += std::norm(e.first - avg.first);
    v2 += std::norm(e.second - avg.second);
  }
  const double f = (B - 1.0) / B;
  long total = 0;
  for (const auto& c : res.chains) total += static_cast<long>(c.samples.size());
  out.disconnected = {"disconnected_W" + std::to_string(n), full.first, std::sqrt(f * v1), double(total), {}, 0.0};
  out.connected = {"connected_W" + std::to_string(n), full.second, std::sqrt(f * v2), double(total), {}, 0.0};
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = x.size();
  double D = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double F = cdf(x[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  return D;
}

CltReport check_clt(const std::vector<std::vector<double>>& X, double M1, double M2, bool ks,
                    const std::function<cplx(double)>& predicted, const std::vector<double>& s_grid,
                    double min_ess) {
  CltReport r;
  auto st = batch_means(X);
  r.samples = st.n;
  r.mean = st.mean;
  std::vector<double> all;
  for (const auto& c : X) all.insert(all.end(), c.begin(), c.end());
  r.variance = variance(all);
  if (r.variance < 1e-24 && std::abs(M2) < 1e-24) {
    r.degenerate = true;
    r.ess = static_cast<double>(st.n);
    return r;
  }
  r.ess = st.ess;
  if (r.ess < min_ess) throw numerical_error("clt check: effective sample size below " + std::to_string(min_ess));
  if (ks) {
    const double sd = std::sqrt(2.0 * M2);
    r.ks_stat = ks_distance(all, [&](double x) { return normal_cdf((x - M1) / sd); });
    r.ks_p = kolmogorov_q(std::sqrt(r.ess) * r.ks_stat);
    r.ks_done = true;
  }
  for (double s : s_grid) {
    std::vector<std::vector<double>> re(X.size()), im(X.size());
    for (size_t c = 0; c < X.size(); ++c)
      for (double v : X[c]) {
        re[c].push_back(std::cos(s * v));
        im[c].push_back(std::sin(s * v));
      }
    auto a = batch_means(re), b = batch_means(im);
    CharfnRow row;
    row.s = s;
    row.empirical = {a.mean, b.mean};
    row.se = std::hypot(a.se, b.se);
    row.predicted = predicted(s);
    double err = std::abs(row.empirical - row.predicted);
    row.z = row.se > 0.0 ? err / row.se : (err < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity());
    r.max_z = std::max(r.max_z, row.z);
    r.charfn.push_back(row);
  }
  return r;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

bool ConcentrationReport::pass(double lo, double hi) const {
  if (fixed_filling) {
    for (const auto& p : points)
      if (p.max_scaled != 0.0) return false;
    return true;
  }
  return std::isfinite(slope_median) && slope_median >= lo && slope_median <= hi;
}

ConcentrationReport check_concentration(const std::vector<int>& Ns, const std::vector<std::vector<double>>& deviations,
                                        const std::vector<std::vector<double>>& escapes, bool fixed_filling) {
  ConcentrationReport r;
  r.fixed_filling = fixed_filling;
  std::vector<double> lx, lmed, lmean, esc_n, esc_l;
  bool zero_median = false;
  double C = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < Ns.size(); ++k) {
    ConcentrationPoint p;
    p.N = Ns[k];
    std::vector<double> a;
    for (double v : deviations[k]) a.push_back(std::abs(v));
    std::sort(a.begin(), a.end());
    const double scale = std::sqrt(p.N * std::log(double(p.N)));
    if (!a.empty()) {
      size_t m = a.size();
      p.median_abs = m % 2 ? a[m / 2] : 0.5 * (a[m / 2 - 1] + a[m / 2]);
      p.mean_abs = std::accumulate(a.begin(), a.end(), 0.0) / m;
      p.max_scaled = a.back() / scale;
      // empirical tail P(|dev| >= t sqrt(N ln N)) <= exp{N ln N (C - t^2)}
      for (size_t i = 0; i < m; ++i) {
        double t = a[i] / scale, tail = double(m - i) / m;
        C = std::max(C, std::log(tail) / (p.N * std::log(double(p.N))) + t * t);
      }
    }
    if (k < escapes.size() && !escapes[k].empty()) {
      double e = 0.0;
      for (double v : escapes[k]) e += v > 0.0;
      p.escape_fraction = e / escapes[k].size();
      if (e > 0) {
        esc_n.push_back(p.N);
        esc_l.push_back(std::log(p.escape_fraction));
      }
    }
    lx.push_back(std::log(double(p.N)));
    if (p.median_abs <= 0.0) zero_median = true;
    lmed.push_back(p.median_abs > 0.0 ? std::log(p.median_abs) : 0.0);
    lmean.push_back(std::log(std::max(p.mean_abs, 1e-300)));
    r.points.push_back(p);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.slope_median = (zero_median || lx.size() < 2) ? nan : regression_slope(lx, lmed);
  r.slope_mean = lx.size() < 2 ? nan : regression_slope(lx, lmean);
  r.fitted_C = C;
  r.escape_rate = esc_n.size() >= 2 ? regression_slope(esc_n, esc_l) : nan;
  return r;
}

}  // namespace rbody
