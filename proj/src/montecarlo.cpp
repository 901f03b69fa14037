#include "rbody/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <thread>

#include "rbody/quadrature.hpp"
#include "rbody/simd.hpp"

namespace rbody {

namespace {

double fact(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Piecewise table of the cumulative mass of a density on intervals, in the
// variable theta with x = c - d cos(theta), so that edge singularities of the
// density are smoothed by the sin(theta) Jacobian.
class CdfTable {
 public:
  CdfTable(const std::function<double(double)>& rho, const std::vector<std::pair<double, double>>& iv, int panels = 1024)
      : rho_(rho), iv_(iv), P_(panels) {
    gl_ = gauss_legendre(6);
    for (const auto& [a, b] : iv_) {
      std::vector<double> cum(P_ + 1, 0.0);
      for (int k = 0; k < P_; ++k) cum[k + 1] = cum[k] + piece(a, b, theta(k), theta(k + 1));
      cum_.push_back(cum);
    }
    double s = 0.0;
    for (auto& c : cum_) {
      start_.push_back(s);
      s += c.back();
    }
    total_ = s;
  }

  double total() const { return total_; }

  // smallest x with normalized CDF >= u
  double inverse(double u) const {
    double target = u * total_;
    int h = 0;
    while (h + 1 < static_cast<int>(iv_.size()) && start_[h + 1] < target) ++h;
    double t = target - start_[h];
    const auto& cum = cum_[h];
    const auto [a, b] = iv_[h];
    if (t >= cum.back()) return b;
    if (t <= 0.0) return a;
    int k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin()) - 1;
    k = std::clamp(k, 0, P_ - 1);
    double lo = theta(k), hi = theta(k + 1), rem = t - cum[k];
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (piece(a, b, theta(k), mid) >= rem)
        hi = mid;
      else
        lo = mid;
    }
    return xof(a, b, hi);
  }

  // Sampling with linear interpolation in theta inside a panel, and its exact density.
  double draw(double u) const {
    double target = u * total_;
    int h = 0;
    while (h + 1 < static_cast<int>(iv_.size()) && start_[h + 1] < target) ++h;
    const auto& cum = cum_[h];
    double t = std::clamp(target - start_[h], 0.0, cum.back());
    int k = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin()) - 1;
    k = std::clamp(k, 0, P_ - 1);
    double m = cum[k + 1] - cum[k];
    double f = m > 0.0 ? (t - cum[k]) / m : 0.5;
    return xof(iv_[h].first, iv_[h].second, theta(k) + f * (theta(k + 1) - theta(k)));
  }

  double draw_density(double x) const {
    for (size_t h = 0; h < iv_.size(); ++h) {
      const auto [a, b] = iv_[h];
      if (x <= a || x >= b) continue;
      double c = 0.5 * (a + b), d = 0.5 * (b - a);
      double th = std::acos(std::clamp((c - x) / d, -1.0, 1.0));
      int k = std::min(P_ - 1, static_cast<int>(th / (kPi / P_)));
      double m = cum_[h][k + 1] - cum_[h][k];
      return m / ((kPi / P_) * d * std::sin(th)) / total_;
    }
    return 0.0;
  }

 private:
  double theta(int k) const { return kPi * k / P_; }
  static double xof(double a, double b, double th) { return 0.5 * (a + b) - 0.5 * (b - a) * std::cos(th); }
  double piece(double a, double b, double t0, double t1) const {
    double s = 0.0, d = 0.5 * (b - a);
    for (size_t q = 0; q < gl_.x.size(); ++q) {
      double th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gl_.x[q];
      s += gl_.w[q] * rho_(xof(a, b, th)) * d * std::sin(th);
    }
    return 0.5 * (t1 - t0) * s;
  }

  std::function<double(double)> rho_;
  std::vector<std::pair<double, double>> iv_;
  int P_;
  QuadRule gl_;
  std::vector<std::vector<double>> cum_;
  std::vector<double> start_;
  double total_ = 0.0;
};

std::vector<std::pair<double, double>> support_intervals(const EquilibriumMeasure& eq, int segment = -1) {
  std::vector<std::pair<double, double>> iv;
  for (const auto& c : eq.support.cuts())
    if (segment < 0 || c.segment == segment) iv.push_back({c.a, c.b});
  return iv;
}

}  // namespace

LogDensity::LogDensity(const ModelConfig& cfg, int N) : N_(N), beta_(cfg.beta), domain_(cfg.domain) {
  if (cfg.potential.r() >= 4 && N > 200) throw config_error("sampler: r >= 4 with N > 200 is refused (cost guard)");
  const double n = N;
  for (const auto& c : cfg.potential.components()) {
    const int a = c.arity;
    if (c.kernel) {
      kernels_.push_back({c.kernel, c.weight / 2.0});
    } else if (c.func) {
      funcs_.push_back({c.func, c.weight * n});
    } else {
      for (const auto& t : c.sep) {
        SepBlock b;
        b.factor = c.weight * std::pow(n, 2 - a) / fact(a) * t.c;
        for (const auto& p : t.f) {
          int idx = -1;
          for (size_t q = 0; q < polys_.size(); ++q)
            if (polys_[q].coeffs() == p.coeffs()) idx = static_cast<int>(q);
          if (idx < 0) {
            idx = static_cast<int>(polys_.size());
            polys_.push_back(p);
          }
          b.slots.push_back(idx);
        }
        seps_.push_back(b);
      }
    }
  }
}

double LogDensity::kval(const KernelBlock& kb, double a, double b) const {
  return kb.k->value(a, b, domain_.nearest_segment(a), domain_.nearest_segment(b)).real();
}

double LogDensity::sep_energy(const std::vector<double>& S) const {
  double e = 0.0;
  for (const auto& b : seps_) {
    double p = b.factor;
    for (int s : b.slots) p *= S[s];
    e += p;
  }
  return e;
}

double LogDensity::interaction(const std::vector<double>& x) const {
  std::vector<double> S(polys_.size(), 0.0);
  for (size_t q = 0; q < polys_.size(); ++q)
    for (double v : x) S[q] += polys_[q](v);
  double e = sep_energy(S);
  for (const auto& kb : kernels_) {
    double s = 0.0;
    for (double a : x)
      for (double b : x) s += kval(kb, a, b);
    e += kb.factor * s;
  }
  for (const auto& fb : funcs_)
    for (double v : x) e += fb.factor * fb.f->value(v, domain_.nearest_segment(v)).real();
  return e;
}

double LogDensity::full(const std::vector<double>& x) const {
  double v = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j) v += std::log(std::abs(x[i] - x[j]));
  return beta_ * v + interaction(x);
}

void LogDensity::bind(const std::vector<double>& x) {
  S_.assign(polys_.size(), 0.0);
  for (size_t q = 0; q < polys_.size(); ++q)
    for (double v : x) S_[q] += polys_[q](v);
}

double LogDensity::delta_move(const std::vector<double>& x, int i, double xn) const {
  const double xo = x[i];
  double d = 0.0;
  if (!seps_.empty()) {
    std::vector<double> S = S_;
    for (size_t q = 0; q < polys_.size(); ++q) S[q] += polys_[q](xn) - polys_[q](xo);
    d += sep_energy(S) - sep_energy(S_);
  }
  for (const auto& kb : kernels_) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j)
      if (static_cast<int>(j) != i) s += kval(kb, xn, x[j]) - kval(kb, xo, x[j]);
    d += kb.factor * (2.0 * s + kval(kb, xn, xn) - kval(kb, xo, xo));
  }
  for (const auto& fb : funcs_)
    d += fb.factor *
         (fb.f->value(xn, domain_.nearest_segment(xn)) - fb.f->value(xo, domain_.nearest_segment(xo))).real();
  return d;
}

void LogDensity::commit_move(const std::vector<double>& x, int i, double xn) {
  for (size_t q = 0; q < polys_.size(); ++q) S_[q] += polys_[q](xn) - polys_[q](x[i]);
}

std::vector<double> quantile_init(const std::function<double(double)>& density,
                                  const std::vector<std::pair<double, double>>& intervals, int N) {
  CdfTable cdf(density, intervals);
  std::vector<double> x(N);
  for (int i = 1; i <= N; ++i) x[i - 1] = cdf.inverse(static_cast<double>(i) / N);
  return x;
}

std::vector<double> quantile_init(const EquilibriumMeasure& eq, int N) {
  return quantile_init([&](double x) { return eq.density_at(x); }, support_intervals(eq), N);
}

namespace {

std::vector<double> initial_state(const EquilibriumMeasure& eq, const SamplerOptions& opt) {
  auto rho = [&](double x) { return eq.density_at(x); };
  std::vector<double> x;
  if (!opt.fixed_filling) {
    x = quantile_init(rho, support_intervals(eq), opt.N);
  } else {
    for (size_t h = 0; h < opt.counts.size(); ++h) {
      if (opt.counts[h] == 0) continue;
      auto iv = support_intervals(eq, static_cast<int>(h));
      if (iv.empty()) {
        const auto& s = eq.domain.segments[h];
        iv.push_back({s.lo, s.hi});
      }
      auto part = quantile_init(rho, iv, opt.counts[h]);
      x.insert(x.end(), part.begin(), part.end());
    }
  }
  // move the top quantile (a soft edge or a hard edge) slightly inside so no two coincide
  for (size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i + 1] - x[i] < 1e-9) x[i + 1] = x[i] + 1e-9;
  for (size_t i = 0; i < x.size(); ++i) {
    int s = eq.domain.nearest_segment(x[i]);
    const auto& seg = eq.domain.segments[s];
    x[i] = std::clamp(x[i], seg.lo + 1e-10 * (1 + i), seg.hi - 1e-10 * (x.size() - i));
  }
  return x;
}

double vandermonde_delta(const std::vector<double>& x, int i, double xn, double& min_abs) {
  const double* y = x.data();
  const std::size_t n = x.size();
  LogDistance a = log_distance(y, i, xn), b = log_distance(y + i + 1, n - i - 1, xn);
  LogDistance c = log_distance(y, i, x[i]), d = log_distance(y + i + 1, n - i - 1, x[i]);
  min_abs = std::min(a.min_abs, b.min_abs);
  return a.sum + b.sum - c.sum - d.sum;
}

ChainResult run_chain(const ModelConfig& cfg, const EquilibriumMeasure& eq, const SamplerOptions& opt,
                      const std::vector<Observable>& obs, int chain_id) {
  ChainResult res;
  res.simd = simd_name(simd_level());
  std::seed_seq ss{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                   static_cast<std::uint32_t>(chain_id), 0x5eedu};
  std::mt19937_64 rng(ss);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Domain& dom = cfg.domain;
  const int G = dom.count();
  const int N = opt.N;
  LogDensity L(cfg, N);
  std::vector<double> x = initial_state(eq, opt);
  if (static_cast<int>(x.size()) != N) throw config_error("sampler: particle counts do not add up to N");
  std::vector<int> seg(N);
  for (int i = 0; i < N; ++i) seg[i] = dom.nearest_segment(x[i]);
  L.bind(x);
  double cached = L.full(x);

  const bool jumps = !opt.fixed_filling && G > 1 && opt.jump_prob > 0.0;
  std::unique_ptr<CdfTable> qtab;
  double Alen = 0.0;
  for (const auto& s : dom.segments) Alen += s.length();
  if (jumps) qtab = std::make_unique<CdfTable>([&](double v) { return eq.density_at(v); }, support_intervals(eq));
  auto qdens = [&](double v) { return 0.9 * qtab->draw_density(v) + 0.1 / Alen; };
  auto qdraw = [&]() {
    if (unif(rng) < 0.9) return qtab->draw(unif(rng));
    double u = unif(rng) * Alen;
    for (const auto& s : dom.segments) {
      if (u <= s.length()) return s.lo + u;
      u -= s.length();
    }
    return dom.segments.back().hi;
  };

  std::vector<double> scale(G);
  for (int h = 0; h < G; ++h) scale[h] = 0.5 * dom.segments[h].length() / N;
  for (const auto& c : eq.support.cuts()) scale[c.segment] = std::max(1e-6, (c.b - c.a) / N);
  double dscale = 0.3 / N;
  std::vector<long> tried(G, 0), acc(G, 0);
  long dtried = 0, dacc = 0, jtried = 0, jacc = 0, ltried = 0, lacc = 0, moves = 0;
  const long burn = opt.burnin >= 0 ? opt.burnin : 20L * N;

  auto audit = [&]() {
    double f = L.full(x);
    res.max_audit_drift = std::max(res.max_audit_drift, std::abs(f - cached) / std::max(1.0, std::abs(f)));
    cached = f;
  };

  for (long sweep = 0; sweep < burn + opt.sweeps; ++sweep) {
    const bool burning = sweep < burn;
    for (int mv = 0; mv < N; ++mv) {
      const int i = static_cast<int>(unif(rng) * N) % N;
      const bool jump = jumps && unif(rng) < opt.jump_prob;
      double xn, extra = 0.0;
      if (jump) {
        xn = qdraw();
        extra = std::log(qdens(x[i])) - std::log(qdens(xn));
        ++jtried;
      } else {
        xn = x[i] + scale[seg[i]] * gauss(rng);
        ++tried[seg[i]];
        ++ltried;
      }
      ++moves;
      int sn = dom.segment_of(xn);
      bool ok = sn >= 0 && !(opt.fixed_filling && sn != seg[i]);
      if (ok) {
        double mn;
        double dv = vandermonde_delta(x, i, xn, mn);
        if (mn > 1e-12) {
          double d = L.beta() * dv + L.delta_move(x, i, xn) + extra;
          if (std::log(unif(rng)) < d) {
            L.commit_move(x, i, xn);
            x[i] = xn;
            seg[i] = sn;
            cached += d - extra;
            if (jump)
              ++jacc;
            else {
              ++acc[seg[i]];
              ++lacc;
            }
          }
        }
      }
      if (opt.audit_every > 0 && moves % opt.audit_every == 0) audit();
    }
    if (opt.dilation) {
      double s = std::exp(dscale * gauss(rng));
      std::vector<double> y(x);
      bool ok = true;
      for (int i = 0; i < N && ok; ++i) {
        y[i] = s * x[i];
        int sn = dom.segment_of(y[i]);
        ok = sn >= 0 && !(opt.fixed_filling && sn != seg[i]);
      }
      ++dtried;
      if (ok) {
        double ls = std::log(s);
        double d = L.beta() * 0.5 * N * (N - 1.0) * ls + L.interaction(y) - L.interaction(x);
        if (std::log(unif(rng)) < d + N * ls) {
          x = y;
          for (int i = 0; i < N; ++i) seg[i] = dom.segment_of(x[i]);
          L.bind(x);
          cached += d;
          ++dacc;
        }
      }
    }
    if (burning && (sweep + 1) % 50 == 0) {
      for (int h = 0; h < G; ++h) {
        if (tried[h] == 0) continue;
        double r = static_cast<double>(acc[h]) / tried[h];
        scale[h] *= std::exp(2.0 * (r - opt.target_accept));
        tried[h] = acc[h] = 0;
      }
      if (dtried > 0) {
        double r = static_cast<double>(dacc) / dtried;
        dscale *= std::exp(2.0 * (r - opt.target_accept));
        dtried = dacc = 0;
      }
      if (sweep + 1 == burn) jtried = jacc = ltried = lacc = 0;
    }
    if (!burning && (sweep - burn) % opt.thin == 0) {
      std::vector<cplx> v(obs.size(), 0.0);
      for (size_t k = 0; k < obs.size(); ++k)
        for (double xi : x) v[k] += obs[k](xi);
      res.samples.push_back(std::move(v));
      std::vector<int> cnt(G, 0);
      for (int i = 0; i < N; ++i) ++cnt[seg[i]];
      res.counts.push_back(cnt);
      if (opt.keep_positions) res.positions.push_back(x);
    }
  }
  audit();
  res.accept_local = ltried > 0 ? static_cast<double>(lacc) / ltried : 0.0;
  res.accept_jump = jtried > 0 ? static_cast<double>(jacc) / jtried : 0.0;
  res.accept_dilation = dtried > 0 ? static_cast<double>(dacc) / dtried : 0.0;
  if (res.accept_local < 0.01 && opt.sweeps > 0) throw numerical_error("sampler: persistent acceptance below 0.01");
  res.scale = scale;
  res.final_state = x;
  return res;
}

}  // namespace

SampleResult sample(const ModelConfig& cfg, const EquilibriumMeasure& eq, const SamplerOptions& opt,
                    const std::vector<Observable>& obs) {
  if (opt.N < 2) throw config_error("sampler: N must be at least 2");
  if (opt.chains < 1) throw config_error("sampler: need at least one chain");
  if (opt.thin < 1) throw config_error("sampler: thin must be positive");
  if (opt.fixed_filling) {
    int s = 0;
    for (int c : opt.counts) s += c;
    if (static_cast<int>(opt.counts.size()) != cfg.domain.count() || s != opt.N)
      throw config_error("sampler: fixed filling needs one count per segment summing to N");
  }
  SampleResult out;
  out.N = opt.N;
  out.beta = cfg.beta;
  out.seed = opt.seed;
  out.chains.resize(opt.chains);
  std::vector<std::exception_ptr> err(opt.chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c; (c = next++) < opt.chains;) {
      try {
        out.chains[c] = run_chain(cfg, eq, opt, obs, c);
      } catch (...) {
        err[c] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, std::min(opt.jobs, opt.chains)); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

BalanceAudit detailed_balance_audit(const ModelConfig& cfg, const EquilibriumMeasure& eq, int N, int proposals,
                                    std::uint64_t seed) {
  BalanceAudit a;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SamplerOptions opt;
  opt.N = N;
  std::vector<double> x = quantile_init(eq, N);
  for (double& v : x) v += 1e-3 * gauss(rng);
  for (double& v : x) v = std::clamp(v, cfg.domain.lo(), cfg.domain.hi());
  LogDensity L(cfg, N);
  L.bind(x);
  double base = L.full(x);
  for (int p = 0; p < proposals; ++p) {
    int i = static_cast<int>(unif(rng) * N) % N;
    double xn = x[i] + 0.05 * gauss(rng);
    if (cfg.domain.segment_of(xn) < 0) continue;
    double mn;
    double inc = L.beta() * vandermonde_delta(x, i, xn, mn) + L.delta_move(x, i, xn);
    std::vector<double> y(x);
    y[i] = xn;
    double ex = L.full(y) - base;
    a.max_error = std::max(a.max_error, std::abs(inc - ex) / std::max(1.0, std::abs(ex)));
    ++a.proposals;
    if (unif(rng) < 0.5) {
      L.commit_move(x, i, xn);
      x = y;
      base = L.full(x);
    }
  }
  return a;
}

}  // namespace rbody
