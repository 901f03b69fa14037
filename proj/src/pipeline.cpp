#include "rbody/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "rbody/config.hpp"
#include "rbody/convexity.hpp"
#include "rbody/equilibrium.hpp"
#include "rbody/estimators.hpp"
#include "rbody/expansion.hpp"
#include "rbody/montecarlo.hpp"
#include "rbody/operators.hpp"
#include "rbody/partition.hpp"
#include "rbody/simd.hpp"
#include "rbody/theta.hpp"

namespace rbody {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kVerifyZ = 5.0;

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

const char* edge_name(EdgeType e) { return e == EdgeType::Hard ? "hard" : "soft"; }

json check(const std::string& name, double value, double tol, bool pass) {
  return {{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}};
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream o(p);
  if (!o) throw config_error("cannot write " + p.string());
  o << std::setw(2) << j << "\n";
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw dependency_error("missing artifact " + p.string());
  json j;
  in >> j;
  return j;
}

struct Context {
  PipelineSpec spec;
  ModelConfig cfg;
  std::string hash;
  fs::path out;
  std::shared_ptr<EquilibriumMeasure> eq;
  std::shared_ptr<OperatorSet> ops;
  std::unique_ptr<CorrelatorCache> cc;
  std::unique_ptr<FreeEnergyData> data;

  void require(const std::string& artifact, const std::string& stage) const {
    fs::path p = out / artifact;
    if (!fs::exists(p))
      throw dependency_error("stage '" + stage + "' needs " + artifact + " in " + out.string() +
                             " (run the producing stage first)");
    if (p.extension() == ".json") {
      json j = read_json(p);
      if (j.value("config_hash", std::string()) != hash)
        throw dependency_error(artifact + " was produced from a different configuration");
    }
  }
  const EquilibriumMeasure& equilibrium() {
    if (!eq) eq = std::make_shared<EquilibriumMeasure>(solve_equilibrium(cfg));
    return *eq;
  }
  const CorrelatorCache& correlators() {
    if (!cc) {
      equilibrium();
      ops = std::make_shared<OperatorSet>(eq, cfg.potential);
      cc = std::make_unique<CorrelatorCache>(expand_correlators(ops, 1));
    }
    return *cc;
  }
  const FreeEnergyData& free_energy() {
    if (!data)
      data = std::make_unique<FreeEnergyData>(build_free_energy_data(cfg, 0.01, spec.t_nodes, spec.jobs));
    return *data;
  }
};

std::vector<cplx> real_probe_grid(const Domain& d) {
  std::vector<cplx> x;
  const double span = d.hi() - d.lo();
  for (int i = 0; i < 100; ++i) x.push_back(d.lo() - 0.05 - span * (99 - i) / 99.0);
  for (int i = 0; i < 100; ++i) x.push_back(d.hi() + 0.05 + span * i / 99.0);
  return x;
}

std::vector<double> charfn_grid() {
  std::vector<double> s;
  for (int i = 0; i <= 60; ++i) s.push_back(-3.0 + 0.1 * i);
  return s;
}

json stage_eqsolve(Context& c) {
  const EquilibriumMeasure& eq = c.equilibrium();
  json out;
  out["config_hash"] = c.hash;
  json cuts = json::array();
  for (const auto& k : eq.support.cuts())
    cuts.push_back({{"a", k.a}, {"b", k.b}, {"lo", edge_name(k.lo)}, {"hi", edge_name(k.hi)}, {"segment", k.segment}});
  out["cuts"] = cuts;
  out["filling"] = eq.filling;
  out["cut_mass"] = eq.cut_mass;
  out["C"] = eq.C;
  out["fixed_filling"] = eq.fixed_filling;
  out["outer_iterations"] = eq.outer_iterations;
  out["fixed_point_residual"] = eq.fixed_point_residual;
  out["notes"] = eq.notes;
  HypothesisReport h = check_hypotheses(eq);
  out["hypotheses"] = {{"max_teff_off_support", h.max_teff_off_support},
                       {"max_abs_teff_on_support", h.max_abs_teff_on_support},
                       {"confinement_ok", h.confinement_ok},
                       {"off_critical", h.off_critical},
                       {"min_regularized_density", h.min_regularized_density},
                       {"notes", h.notes},
                       {"uniqueness", "global minimizer uniqueness is assumed, not verified"}};
  json conv;
  try {
    bool fourier = true;
    for (const auto& comp : c.cfg.potential.components())
      if (comp.arity >= 2 && !(comp.arity == 2 && comp.kernel && comp.kernel->translation_invariant())) fourier = false;
    ConvexityReport r = check_convexity(c.cfg.potential, c.cfg.domain, c.cfg.beta,
                                        fourier ? ConvexityMode::Fourier : ConvexityMode::Sampled, &eq);
    conv = {{"mode", fourier ? "fourier" : "sampled"}, {"minimum", r.symbol_min}, {"q_values", r.q_values},
            {"pass", r.pass}, {"notes", r.notes}};
  } catch (const Error& e) {
    conv = {{"error", e.what()}};
  }
  out["convexity"] = conv;
  json dens = json::array();
  for (const auto& k : eq.support.cuts())
    for (int i = 1; i < 200; ++i) {
      double x = k.center() - k.half() * std::cos(kPi * i / 200.0);
      dens.push_back({x, eq.density_at(x)});
    }
  out["density"] = dens;
  write_json(c.out / "equilibrium.json", out);

  json checks = json::array();
  const double mass = eq.density.mass();
  checks.push_back(check("mass", std::abs(mass - 1.0), 1e-10, std::abs(mass - 1.0) <= 1e-10));
  checks.push_back(check("confinement", h.max_teff_off_support, 0.0, h.confinement_ok));
  checks.push_back(check("off_critical", h.min_regularized_density, 0.0, h.off_critical));
  if (conv.contains("pass")) checks.push_back(check("convexity", conv["minimum"], 0.0, conv["pass"]));
  return {{"artifacts", {"equilibrium.json"}}, {"checks", checks}};
}

json fluct_json(const Fluctuations& f) {
  return {{"mean_leading", f.mean_leading}, {"M1", f.M1.real()}, {"M2", f.M2.real()}, {"w", f.w}};
}

json stage_expand(Context& c) {
  c.require("equilibrium.json", "expand");
  if (c.spec.nmax < 1 || c.spec.nmax > 2) throw config_error("--nmax must be 1 or 2 (higher correlators are not computed)");
  const CorrelatorCache& cc = c.correlators();
  const int kmax = std::min(1, std::max(0, c.spec.k0));
  json out;
  out["config_hash"] = c.hash;
  out["kmax"] = kmax;
  out["nmax"] = c.spec.nmax;
  out["max_period"] = cc.max_period;
  out["symmetry_defect"] = cc.symmetry_defect;
  out["condition"] = c.ops->condition();
  out["notes"] = cc.notes;
  json w1 = json::array();
  for (cplx x : real_probe_grid(c.cfg.domain)) {
    json row = {x.real(), c.eq->W(x).real()};
    for (int k = 0; k <= kmax; ++k) row.push_back(cc.W1_at(k, x).real());
    w1.push_back(row);
  }
  out["W1"] = w1;
  if (c.spec.nmax >= 2) {
    json w2 = json::array();
    const double lo = c.cfg.domain.lo() - 0.5, hi = c.cfg.domain.hi() + 0.5;
    for (cplx a : {cplx(lo, 0.0), cplx(hi, 0.0), cplx(0.0, 1.0)})
      for (cplx b : {cplx(lo - 1.0, 0.0), cplx(hi + 1.0, 0.0), cplx(0.5, -1.5)}) {
        cplx v = cc.W20(a, b);
        w2.push_back({a.real(), a.imag(), b.real(), b.imag(), v.real(), v.imag()});
      }
    out["W2_0"] = w2;
  }
  out["fluctuations"] = {{"x", fluct_json(linear_stat_fluctuations([](cplx z) { return z; }, cc))},
                         {"x2", fluct_json(linear_stat_fluctuations([](cplx z) { return z * z; }, cc))}};
  write_json(c.out / "expansion.json", out);
  json checks = json::array();
  checks.push_back(check("period_certification", cc.max_period, 1e-8, cc.max_period <= 1e-8));
  checks.push_back(check("W2_symmetry", cc.symmetry_defect, 1e-8, cc.symmetry_defect <= 1e-8));
  return {{"artifacts", {"expansion.json"}}, {"checks", checks}};
}

json stage_partition(Context& c) {
  c.require("expansion.json", "partition");
  const FreeEnergyData& d = c.free_energy();
  const int N = c.spec.N > 0 ? c.spec.N : c.cfg.N;
  json out;
  out["config_hash"] = c.hash;
  out["g"] = d.g;
  out["eps_star"] = d.eps_star;
  out["F"] = {d.deriv[0][0], d.deriv[1][0], d.deriv[2][0]};
  out["derivatives"] = {d.deriv[0], d.deriv[1], d.deriv[2]};
  out["richardson"] = d.richardson;
  out["edge_drift"] = d.edge_drift;
  out["gamma"] = d.gamma;
  Rational br;
  if (rational_beta(d.beta, br)) out["gamma_exact"] = gamma_exponent(d.edges, br).str();
  json checks = json::array();
  if (d.g == 1) {
    HessianRoutes h = energy_hessian(c.cfg, d);
    out["hessian"] = {{"finite_difference", h.fd(0, 0)}, {"second_variation", h.q(0, 0)}, {"rel_diff", h.rel_diff}};
    checks.push_back(check("hessian_positive", h.fd(0, 0), 0.0, h.fd(0, 0) > 0.0));
    checks.push_back(check("hessian_routes", h.rel_diff, 1e-4, h.rel_diff <= 1e-4));
  }
  ZAssembly z = assemble_Z(N, d, c.spec.k0);
  double lat = lattice_sum_log(N, d);
  const double rel = std::abs(std::expm1(z.log_Z() - lat));
  json terms = json::array();
  for (const auto& t : z.terms) terms.push_back({{"name", t.name}, {"re", t.value.real()}, {"im", t.value.imag()}});
  out["assembly"] = {{"N", N},           {"log_power", z.log_power}, {"log_smooth", z.log_smooth},
                     {"theta", z.theta_only}, {"gamma_N", z.gammaN},    {"log_Z_without_power", z.log_Z()},
                     {"lattice_sum_log", lat}, {"rel_diff", rel},       {"terms", terms}};
  checks.push_back(check("assembly_vs_lattice", rel, 1e-3, rel <= 1e-3));
  const CorrelatorCache& cc = c.correlators();
  Fluctuations f = linear_stat_fluctuations([](cplx x) { return x * x; }, cc);
  json cf = json::array();
  for (double s : charfn_grid()) {
    cplx v = clt_charfn(s, f, N, &d);
    cf.push_back({s, v.real(), v.imag()});
  }
  out["charfn_x2"] = cf;
  write_json(c.out / "partition.json", out);
  return {{"artifacts", {"partition.json"}}, {"checks", checks}};
}

json stage_sample(Context& c) {
  c.require("equilibrium.json", "sample");
  const EquilibriumMeasure& eq = c.equilibrium();
  SamplerOptions o;
  o.N = c.spec.N > 0 ? c.spec.N : c.cfg.N;
  o.sweeps = c.spec.steps > 0 ? c.spec.steps : 2000;
  o.chains = c.spec.chains > 0 ? c.spec.chains : 8;
  o.seed = c.spec.seed;
  o.jobs = c.spec.jobs;
  // the unconstrained law is sampled; per-segment counts are recorded
  SampleResult r = sample(c.cfg, eq, o, {[](double x) { return cplx(x); }, [](double x) { return cplx(x * x); }});
  ChainFile f;
  f.config_hash = c.hash;
  f.N = o.N;
  f.seed = o.seed;
  f.chains = o.chains;
  f.observables = 2;
  f.segments = c.cfg.domain.count();
  json acc = json::array();
  double drift = 0.0;
  for (const auto& ch : r.chains) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < ch.samples.size(); ++i) {
      std::vector<double> row = {ch.samples[i][0].real(), ch.samples[i][1].real()};
      for (int n : ch.counts[i]) row.push_back(n);
      rows.push_back(std::move(row));
    }
    f.rows.push_back(std::move(rows));
    acc.push_back({{"local", ch.accept_local}, {"jump", ch.accept_jump}, {"dilation", ch.accept_dilation},
                   {"audit_drift", ch.max_audit_drift}});
    drift = std::max(drift, ch.max_audit_drift);
  }
  write_chain_file((c.out / "chains.bin").string(), f);
  json out = {{"config_hash", c.hash}, {"N", o.N},     {"sweeps", o.sweeps},
              {"chains", o.chains},    {"seed", o.seed}, {"simd", simd_name(simd_level())},
              {"acceptance", acc}};
  write_json(c.out / "sample.json", out);
  json checks = json::array();
  checks.push_back(check("audit_drift", drift, 1e-8, drift <= 1e-8));
  return {{"artifacts", {"chains.bin", "sample.json"}}, {"checks", checks}};
}

json stage_verify(Context& c) {
  c.require("expansion.json", "verify");
  c.require("chains.bin", "verify");
  ChainFile f = read_chain_file((c.out / "chains.bin").string());
  if (f.config_hash != c.hash) throw dependency_error("chains.bin was produced from a different configuration");
  const CorrelatorCache& cc = c.correlators();
  const EquilibriumMeasure& eq = c.equilibrium();
  const int N = f.N;
  const int G = f.segments;
  Fluctuations fl = linear_stat_fluctuations([](cplx x) { return x * x; }, cc);
  const double centre = N * fl.mean_leading;
  std::vector<std::vector<double>> X, dev;
  for (const auto& ch : f.rows) {
    X.emplace_back();
    dev.emplace_back();
    for (const auto& row : ch) {
      X.back().push_back(row[1] - centre);
      if (G == 2) dev.back().push_back(row[f.observables + 1] - N * eq.filling[1]);
    }
  }
  json out;
  out["config_hash"] = c.hash;
  json checks = json::array();
  // mean: M1 + w E[N_1 - N eps_1]
  BatchStats m = batch_means(X);
  double pred = fl.M1.real();
  if (G == 2 && !fl.w.empty()) pred += fl.w[0] * batch_means(dev).mean;
  double zm = m.se > 0.0 ? std::abs(m.mean - pred) / m.se : 0.0;
  out["mean_x2"] = {{"estimate", m.mean}, {"se", m.se}, {"ess", m.ess}, {"predicted", pred}, {"z", zm}};
  checks.push_back(check("mean_x2_z", zm, kVerifyZ, zm <= kVerifyZ));
  const FreeEnergyData* d = nullptr;
  if (G == 2) d = &c.free_energy();
  CltReport r = check_clt(X, fl.M1.real(), fl.M2.real(), G == 1,
                          [&](double s) { return clt_charfn(s, fl, N, d); }, {-3, -2, -1, -0.5, 0.5, 1, 2, 3}, 100.0);
  json rows = json::array();
  for (const auto& row : r.charfn)
    rows.push_back({row.s, row.empirical.real(), row.empirical.imag(), row.se, row.predicted.real(),
                    row.predicted.imag(), row.z});
  out["clt"] = {{"ess", r.ess}, {"variance", r.variance}, {"predicted_variance", 2.0 * fl.M2.real()},
                {"ks_stat", r.ks_stat}, {"ks_p", r.ks_p}, {"charfn", rows}, {"max_z", r.max_z}};
  checks.push_back(check("charfn_max_z", r.max_z, kVerifyZ, r.max_z <= kVerifyZ));
  if (r.ks_done) checks.push_back(check("ks_p", r.ks_p, 0.01, r.ks_p > 0.01));
  write_json(c.out / "verify.json", out);
  bool ok = zm <= kVerifyZ && r.max_z <= kVerifyZ;
  json res = {{"artifacts", {"verify.json"}}, {"checks", checks}};
  if (!ok) res["mismatch"] = true;
  return res;
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> s = {"eqsolve", "expand", "partition", "sample", "verify"};
  return s;
}

std::vector<std::string> normalize_stages(const std::vector<std::string>& stages) {
  std::vector<bool> want(stage_names().size(), false);
  for (const auto& s : stages) {
    if (s == "all") {
      want.assign(want.size(), true);
      continue;
    }
    auto it = std::find(stage_names().begin(), stage_names().end(), s);
    if (it == stage_names().end()) throw config_error("unknown stage '" + s + "'");
    want[it - stage_names().begin()] = true;
  }
  std::vector<std::string> out;
  for (size_t i = 0; i < want.size(); ++i)
    if (want[i]) out.push_back(stage_names()[i]);
  return out;
}

PipelineResult run_pipeline(const PipelineSpec& spec) {
  PipelineResult res;
  json& man = res.manifest;
  man["tool"] = "rbody";
  man["version"] = kVersion;
  man["eigen"] = eigen_version();
  man["seed"] = spec.seed;
  man["tolerances"] = {{"mass", 1e-10}, {"period", 1e-8}, {"hessian_routes", 1e-4}, {"assembly", 1e-3},
                       {"audit_drift", 1e-8}, {"verify_z", kVerifyZ}, {"ks_level", 0.01}};
  man["stages"] = json::array();
  Context c;
  c.spec = spec;
  fs::path manifest_path;
  try {
    std::ifstream in(spec.config_path);
    if (!in) throw config_error("cannot open configuration file '" + spec.config_path + "'");
    json cj;
    try {
      in >> cj;
    } catch (const json::parse_error& e) {
      throw config_error("parse error in '" + spec.config_path + "': " + e.what());
    }
    c.cfg = parse_config(cj);
    c.hash = config_hash(cj);
    man["config_hash"] = c.hash;
    c.out = spec.out_dir;
    fs::create_directories(c.out);
    manifest_path = c.out / "manifest.json";
  } catch (const Error& e) {
    res.exit_code = exit_code(e.kind());
    res.failed_stage = "config";
    res.message = e.what();
    man["error"] = {{"stage", "config"}, {"message", e.what()}};
    return res;
  }
  std::vector<std::string> stages;
  try {
    stages = normalize_stages(spec.stages);
  } catch (const Error& e) {
    res.exit_code = exit_code(e.kind());
    res.failed_stage = "config";
    res.message = e.what();
    return res;
  }
  for (const auto& st : stages) {
    json entry = {{"name", st}};
    try {
      json r;
      if (st == "eqsolve") r = stage_eqsolve(c);
      if (st == "expand") r = stage_expand(c);
      if (st == "partition") r = stage_partition(c);
      if (st == "sample") r = stage_sample(c);
      if (st == "verify") r = stage_verify(c);
      json hashes = json::object();
      for (const auto& a : r["artifacts"]) hashes[a.get<std::string>()] = file_hash((c.out / a.get<std::string>()).string());
      entry["artifacts"] = hashes;
      entry["checks"] = r["checks"];
      entry["status"] = r.value("mismatch", false) ? "mismatch" : "ok";
      man["stages"].push_back(entry);
      if (r.value("mismatch", false)) {
        res.exit_code = 4;
        res.failed_stage = st;
        res.message = "verification mismatch (see verify.json)";
        break;
      }
    } catch (const Error& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      man["stages"].push_back(entry);
      res.exit_code = exit_code(e.kind());
      res.failed_stage = st;
      res.message = e.what();
      break;
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      man["stages"].push_back(entry);
      res.exit_code = 3;
      res.failed_stage = st;
      res.message = e.what();
      break;
    }
  }
  write_json(manifest_path, man);
  return res;
}

const std::vector<std::string>& plot_kinds() {
  static const std::vector<std::string> k = {"density", "w1", "charfn"};
  return k;
}

std::string emit_plot_data(const std::string& out_dir, const std::string& kind) {
  fs::path out(out_dir);
  std::ostringstream os;
  os << std::setprecision(12);
  if (kind == "density") {
    json j = read_json(out / "equilibrium.json");
    os << "x,rho\n";
    for (const auto& r : j["density"]) os << r[0].get<double>() << "," << r[1].get<double>() << "\n";
  } else if (kind == "w1") {
    json j = read_json(out / "expansion.json");
    const int kmax = j["kmax"];
    os << "x,W_eq";
    for (int k = 0; k <= kmax; ++k) os << ",W1_" << k;
    os << "\n";
    for (const auto& r : j["W1"]) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i].get<double>();
      os << "\n";
    }
  } else if (kind == "charfn") {
    json j = read_json(out / "partition.json");
    os << "s,re,im\n";
    for (const auto& r : j["charfn_x2"])
      os << r[0].get<double>() << "," << r[1].get<double>() << "," << r[2].get<double>() << "\n";
  } else {
    std::string kinds;
    for (const auto& k : plot_kinds()) kinds += (kinds.empty() ? "" : ", ") + k;
    throw config_error("unknown plot kind '" + kind + "' (available: " + kinds + ")");
  }
  fs::path p = out / (kind + ".csv");
  std::ofstream o(p);
  if (!o) throw config_error("cannot write " + p.string());
  o << os.str();
  return p.string();
}

void write_chain_file(const std::string& path, const ChainFile& f) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw config_error("cannot write " + path);
  o.write("RBCH0001", 8);
  std::string h = f.config_hash;
  h.resize(16, ' ');
  o.write(h.data(), 16);
  auto put = [&](auto v) { o.write(reinterpret_cast<const char*>(&v), sizeof v); };
  put(static_cast<std::int32_t>(f.N));
  put(static_cast<std::uint64_t>(f.seed));
  put(static_cast<std::int32_t>(f.chains));
  put(static_cast<std::int32_t>(f.observables));
  put(static_cast<std::int32_t>(f.segments));
  for (const auto& ch : f.rows) {
    put(static_cast<std::int64_t>(ch.size()));
    for (const auto& row : ch) o.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(double));
  }
}

ChainFile read_chain_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dependency_error("missing chain file " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::string(magic, 8) != "RBCH0001") throw config_error(path + " is not a chain file");
  ChainFile f;
  char h[16];
  in.read(h, 16);
  f.config_hash = std::string(h, 16);
  f.config_hash.erase(f.config_hash.find_last_not_of(' ') + 1);
  auto get = [&](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof v); };
  std::int32_t N, chains, obs, seg;
  std::uint64_t seed;
  get(N);
  get(seed);
  get(chains);
  get(obs);
  get(seg);
  f.N = N;
  f.seed = seed;
  f.chains = chains;
  f.observables = obs;
  f.segments = seg;
  const int cols = obs + seg;
  for (int c = 0; c < chains; ++c) {
    std::int64_t n;
    get(n);
    std::vector<std::vector<double>> rows(n, std::vector<double>(cols));
    for (auto& row : rows) in.read(reinterpret_cast<char*>(row.data()), cols * sizeof(double));
    f.rows.push_back(std::move(rows));
  }
  if (!in) throw config_error(path + " is truncated");
  return f;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char s[17];
  std::snprintf(s, sizeof s, "%016llx", static_cast<unsigned long long>(h));
  return s;
}

}  // namespace rbody
