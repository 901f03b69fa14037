#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rbody/equilibrium.hpp"
#include "rbody/model.hpp"

namespace rbody {

// Gibbs weight |Delta(lambda)|^beta exp(sum_comp w N^{2-a}/a! sum over all a-tuples T_a),
// optionally with fixed particle counts per segment.
class LogDensity {
 public:
  LogDensity(const ModelConfig& cfg, int N);

  int N() const { return N_; }
  double beta() const { return beta_; }
  const Domain& domain() const { return domain_; }

  // Full O(N^2) evaluation.
  double full(const std::vector<double>& x) const;
  // Interaction part only (no Vandermonde).
  double interaction(const std::vector<double>& x) const;

  // Incremental state for single-particle moves.
  void bind(const std::vector<double>& x);
  double delta_move(const std::vector<double>& x, int i, double xn) const;  // interaction part
  void commit_move(const std::vector<double>& x, int i, double xn);
  bool has_kernel() const { return !kernels_.empty(); }

 private:
  struct SepBlock {
    double factor;  // w N^{2-a}/a! c
    std::vector<int> slots;  // indices into polys_
  };
  struct KernelBlock {
    std::shared_ptr<const Kernel2> k;
    double factor;  // w / 2
  };
  struct FuncBlock {
    std::shared_ptr<const Func1> f;
    double factor;  // w N
  };
  double kval(const KernelBlock& kb, double a, double b) const;
  double sep_energy(const std::vector<double>& S) const;

  int N_;
  double beta_;
  Domain domain_;
  std::vector<Poly> polys_;
  std::vector<SepBlock> seps_;
  std::vector<KernelBlock> kernels_;
  std::vector<FuncBlock> funcs_;
  std::vector<double> S_;  // sum_i p(x_i) for every poly
};

struct SamplerOptions {
  int N = 100;
  long sweeps = 10000;      // after burn-in
  long burnin = -1;         // sweeps; -1 means 20 N
  int chains = 8;
  std::uint64_t seed = 1;
  bool fixed_filling = false;
  std::vector<int> counts;  // particles per segment in fixed mode
  int thin = 1;
  double target_accept = 0.3;
  double jump_prob = 0.05;  // per move, unconstrained multi-segment mode only
  bool dilation = true;
  int jobs = 1;
  long audit_every = 10000;  // moves between cached/full comparisons
  bool keep_positions = false;
};

// Observables recorded after every `thin` sweeps: sums over particles of f_k.
using Observable = std::function<cplx(double)>;

struct ChainResult {
  std::vector<std::vector<cplx>> samples;  // [sample][observable]
  std::vector<std::vector<int>> counts;    // [sample][segment]
  std::vector<std::vector<double>> positions;
  std::vector<double> final_state;
  double accept_local = 0.0, accept_jump = 0.0, accept_dilation = 0.0;
  double max_audit_drift = 0.0;
  std::vector<double> scale;
  std::string simd;
};

struct SampleResult {
  std::vector<ChainResult> chains;
  int N = 0;
  double beta = 2.0;
  std::uint64_t seed = 0;
};

// CDF inversion: lambda_i = inf{x : int^x dmu >= i/N}.
std::vector<double> quantile_init(const std::function<double(double)>& density,
                                  const std::vector<std::pair<double, double>>& intervals, int N);
std::vector<double> quantile_init(const EquilibriumMeasure& eq, int N);

SampleResult sample(const ModelConfig& cfg, const EquilibriumMeasure& eq, const SamplerOptions& opt,
                    const std::vector<Observable>& obs);

struct BalanceAudit {
  double max_error = 0.0;
  int proposals = 0;
};
// Incremental acceptance ratios against full recomputation on random proposals.
BalanceAudit detailed_balance_audit(const ModelConfig& cfg, const EquilibriumMeasure& eq, int N, int proposals,
                                    std::uint64_t seed);

}  // namespace rbody
