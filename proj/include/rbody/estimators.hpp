#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/domain.hpp"
#include "rbody/montecarlo.hpp"

namespace rbody {

struct BatchStats {
  double mean = 0.0;
  double se = 0.0;
  double ess = 0.0;
  long n = 0;
};

// Batch means pooled over chains; each chain is cut into batches of equal length.
BatchStats batch_means(const std::vector<std::vector<double>>& chains, int batches = 32);
BatchStats batch_means(const std::vector<double>& series, int batches = 32);

struct EstimatorReport {
  std::string id;
  cplx estimate = 0.0;
  double se = 0.0;
  double ess = 0.0;
  std::optional<cplx> target;
  double z = 0.0;  // |estimate - target| / se, only with a target

  void compare(cplx t);
};

// Observables psi_x(l) = 1/(x - l) for each probe; appended to a sampler call.
std::vector<Observable> probe_observables(const std::vector<cplx>& probes);
void check_probes(const Domain& d, const std::vector<cplx>& probes, double min_distance = 0.1);

// Disconnected and connected correlators of order n = probes.size() from the
// observables at indices first..first+n-1, jackknife over batches for the error.
struct CorrelatorEstimate {
  EstimatorReport disconnected;
  EstimatorReport connected;
};
CorrelatorEstimate estimate_correlators(const SampleResult& res, int first, const std::vector<cplx>& probes,
                                        const Domain& d, int batches = 32);

// Set partitions of {0..n-1}.
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

double kolmogorov_q(double lambda);  // P(sqrt(n) D > lambda) asymptotically
double normal_cdf(double x);

struct CharfnRow {
  double s = 0.0;
  cplx empirical = 0.0;
  double se = 0.0;
  cplx predicted = 0.0;
  double z = 0.0;
};

struct CltReport {
  long samples = 0;
  double ess = 0.0;
  double mean = 0.0, variance = 0.0;
  double ks_stat = 0.0, ks_p = 1.0;
  bool ks_done = false;
  bool degenerate = false;
  std::vector<CharfnRow> charfn;
  double max_z = 0.0;
  bool pass_ks() const { return degenerate || !ks_done || ks_p > 0.01; }
  bool pass_charfn(double k = 3.0) const { return degenerate || max_z <= k; }
};

// X_N[phi] series per chain (already centred by N int phi dmu_eq).
CltReport check_clt(const std::vector<std::vector<double>>& X, double M1, double M2, bool ks,
                    const std::function<cplx(double)>& predicted, const std::vector<double>& s_grid,
                    double min_ess = 500.0);
// KS distance of pooled samples against an arbitrary CDF.
double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf);

struct ConcentrationPoint {
  int N = 0;
  double median_abs = 0.0;
  double mean_abs = 0.0;
  double max_scaled = 0.0;       // max |dev| / sqrt(N ln N)
  double escape_fraction = 0.0;  // samples with a particle outside the fattened support
};

struct ConcentrationReport {
  std::vector<ConcentrationPoint> points;
  double slope_median = 0.0;  // NaN when some median is 0
  double slope_mean = 0.0;
  double fitted_C = 0.0;      // smallest C with the envelope exp{N ln N (C - t^2)} above the data
  double escape_rate = 0.0;   // slope of ln(escape fraction) in N, NaN if too few escapes
  bool fixed_filling = false;
  bool pass(double lo = 0.4, double hi = 0.6) const;
};

// deviations[k]: pooled samples of N_1 - N eps_1 at N = Ns[k]; escapes[k]: indicator series.
ConcentrationReport check_concentration(const std::vector<int>& Ns, const std::vector<std::vector<double>>& deviations,
                                        const std::vector<std::vector<double>>& escapes, bool fixed_filling = false);

double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rbody
