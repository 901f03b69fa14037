#include "rbody/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace rbody {

using nlohmann::json;

namespace {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw config_error(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(where + ": bad value for '" + key + "': " + e.what());
  }
}

Poly poly_of(const json& j, const std::string& where) {
  if (!j.is_array()) throw config_error(where + ": polynomial must be an array of coefficients");
  return Poly(j.get<std::vector<double>>());
}

RBodyPotential parse_potential(const json& p, double beta) {
  RBodyPotential T;
  const std::string type = get<std::string>(p, "type", "potential");
  if (type == "polynomial_sum") {
    std::map<int, std::vector<SepTerm>> by_arity;
    Poly one;
    for (const auto& t : get<json>(p, "terms", "potential")) {
      const int a = get<int>(t, "arity", "potential term");
      if (a < 1) throw config_error("potential term: arity must be positive");
      SepTerm s;
      s.c = t.value("coeff", 1.0);
      for (const auto& f : get<json>(t, "factors", "potential term")) s.f.push_back(poly_of(f, "potential term"));
      if (static_cast<int>(s.f.size()) != a) throw config_error("potential term: need one factor per argument");
      if (a == 1)
        one = one + s.f[0] * s.c;
      else
        by_arity[a].push_back(s);
    }
    if (!one.is_zero()) T.add(one_body_polynomial(one));
    for (const auto& [a, terms] : by_arity) T.add(separable_component(a, terms));
  } else if (type == "sinh" || type == "onmodel" || type == "qdeformed") {
    if (type == "sinh") T.add(kernel_component(sinh_kernel(beta, get<double>(p, "strength", "potential"))));
    if (type == "onmodel") T.add(kernel_component(onmodel_kernel(beta, get<double>(p, "n", "potential"))));
    if (type == "qdeformed")
      T.add(kernel_component(
          qdeformed_kernel(beta, get<double>(p, "q", "potential"), get<double>(p, "strength", "potential"))));
    if (p.contains("one_body")) T.add(one_body_polynomial(poly_of(p["one_body"], "potential.one_body")));
  } else {
    throw config_error("potential: unknown type '" + type + "' (polynomial_sum, sinh, onmodel, qdeformed)");
  }
  if (T.components().empty()) throw config_error("potential: no terms");
  return T;
}

}  // namespace

ModelConfig parse_config(const json& j) {
  if (!j.is_object()) throw config_error("configuration must be a JSON object");
  ModelConfig cfg;
  cfg.beta = get<double>(j, "beta", "config");
  cfg.N = j.value("N", 100);
  std::vector<std::pair<double, double>> seg;
  for (const auto& s : get<json>(j, "segments", "config")) {
    if (!s.is_array() || s.size() != 2) throw config_error("segments: each entry must be [lo, hi]");
    seg.push_back({s[0].get<double>(), s[1].get<double>()});
  }
  if (seg.empty()) throw config_error("segments: at least one segment is required");
  for (size_t h = 0; h < seg.size(); ++h) {
    if (!(seg[h].first < seg[h].second)) throw config_error("segments: lo must be below hi");
    if (h > 0 && !(seg[h - 1].second < seg[h].first)) throw config_error("segments: must be ordered and disjoint");
  }
  cfg.domain = build_domain(seg);
  cfg.potential = parse_potential(get<json>(j, "potential", "config"), cfg.beta);
  if (j.contains("r") && j["r"].get<int>() != cfg.potential.r())
    throw config_error("config: r = " + std::to_string(j["r"].get<int>()) + " but the potential has arity " +
                       std::to_string(cfg.potential.r()));
  if (j.contains("filling")) cfg.filling = j["filling"].get<std::vector<double>>();
  if (j.contains("numerics")) {
    const json& n = j["numerics"];
    Numerics& m = cfg.numerics;
    m.nodes = n.value("nodes", m.nodes);
    m.cheb_degree = n.value("cheb_degree", m.cheb_degree);
    m.segment_nodes = n.value("segment_nodes", m.segment_nodes);
    m.contour_levels = n.value("contour_levels", m.contour_levels);
    m.quad_tol = n.value("quad_tol", m.quad_tol);
    m.tol_eq = n.value("tol_eq", m.tol_eq);
    m.max_outer = n.value("max_outer", m.max_outer);
    if (m.nodes < 16 || m.cheb_degree < 8) throw config_error("numerics: node counts too small");
  }
  cfg.validate();
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open configuration file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ModelConfig& cfg) {
  json j;
  j["beta"] = cfg.beta;
  j["N"] = cfg.N;
  json segs = json::array();
  for (const auto& s : cfg.domain.segments) segs.push_back({s.lo, s.hi});
  j["segments"] = segs;
  if (cfg.filling) j["filling"] = *cfg.filling;
  j["potential"] = cfg.potential.describe();
  j["numerics"] = {{"nodes", cfg.numerics.nodes},
                   {"cheb_degree", cfg.numerics.cheb_degree},
                   {"segment_nodes", cfg.numerics.segment_nodes},
                   {"contour_levels", cfg.numerics.contour_levels},
                   {"quad_tol", cfg.numerics.quad_tol},
                   {"tol_eq", cfg.numerics.tol_eq}};
  return j;
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
    case ErrorKind::Dependency:
      return 2;
    case ErrorKind::Numerical:
      return 3;
    case ErrorKind::Verification:
      return 4;
  }
  return 3;
}

}  // namespace rbody
