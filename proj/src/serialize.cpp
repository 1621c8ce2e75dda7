#include "apwave/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace apwave {

namespace {

double parse_generator(const json& entry) {
  if (entry.is_number()) return entry.get<double>();
  if (entry.is_string()) {
    const std::string s = entry.get<std::string>();
    if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
      const std::string inner = s.substr(5, s.size() - 6);
      std::size_t used = 0;
      const double v = std::stod(inner, &used);
      if (used == inner.size() && v >= 0.0) return std::sqrt(v);
    }
    throw std::invalid_argument("pair: cannot parse generator '" + s +
                                "' (use a number or \"sqrt(n)\")");
  }
  throw std::invalid_argument("pair: generator entries must be numbers or strings");
}

json parity_set_to_json(const std::set<unsigned>& parities, std::size_t dim) {
  json arr = json::array();
  for (unsigned p : parities) {
    json vec = json::array();
    for (std::size_t i = 0; i < dim; ++i) vec.push_back((p >> i) & 1u);
    arr.push_back(vec);
  }
  return arr;
}

std::set<unsigned> parity_set_from_json(const json& arr, std::size_t dim,
                                        const char* which) {
  std::set<unsigned> out;
  if (!arr.is_array())
    throw std::invalid_argument(std::string("pair: ") + which +
                                " must be a list of 0/1 vectors");
  for (const auto& vec : arr) {
    if (!vec.is_array() || vec.size() != dim)
      throw std::invalid_argument(std::string("pair: ") + which +
                                  " entry length does not match generators");
    unsigned p = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const int b = vec[i].get<int>();
      if (b != 0 && b != 1)
        throw std::invalid_argument(std::string("pair: ") + which +
                                    " entries must be 0 or 1");
      p |= static_cast<unsigned>(b) << i;
    }
    out.insert(p);
  }
  return out;
}

json vec_to_json(const FreqVector& v) {
  json arr = json::array();
  for (int c : v.coeffs()) arr.push_back(c);
  return arr;
}

FreqVector vec_from_json(const json& arr) {
  std::vector<int> c;
  for (const auto& e : arr) c.push_back(e.get<int>());
  return FreqVector(c);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json pair_to_json(const AdmissiblePair& pair) {
  json j;
  j["generators"] = pair.basis->generators;
  j["coeff_bound"] = pair.basis->coeff_bound;
  j["cutoff"] = pair.basis->cutoff;
  j["cos_parities"] = parity_set_to_json(pair.cos_parities, pair.basis->dim());
  j["sin_parities"] = parity_set_to_json(pair.sin_parities, pair.basis->dim());
  return j;
}

AdmissiblePair pair_from_json(const json& j) {
  if (!j.contains("generators") || !j["generators"].is_array() ||
      j["generators"].empty())
    throw std::invalid_argument("pair: field 'generators' missing or empty");
  std::vector<double> gens;
  for (const auto& e : j["generators"]) gens.push_back(parse_generator(e));
  if (!j.contains("coeff_bound"))
    throw std::invalid_argument("pair: field 'coeff_bound' missing");
  if (!j.contains("cutoff"))
    throw std::invalid_argument("pair: field 'cutoff' missing");

  AdmissiblePair pair;
  pair.basis = make_basis(gens, j["coeff_bound"].get<int>(),
                          j["cutoff"].get<double>());
  const std::size_t d = pair.basis->dim();
  if (!j.contains("cos_parities"))
    throw std::invalid_argument("pair: field 'cos_parities' missing");
  pair.cos_parities = parity_set_from_json(j["cos_parities"], d, "cos_parities");
  if (j.contains("sin_parities"))
    pair.sin_parities = parity_set_from_json(j["sin_parities"], d, "sin_parities");
  return pair;
}

json trigsum_to_json(const TrigSum& u) {
  json j;
  j["mean"] = u.mean_value();
  json terms = json::array();
  const GeneratorBasis& basis = *u.basis();
  struct Row {
    double freq;
    FreqVector vec;
    const char* kind;
    double value;
  };
  std::vector<Row> rows;
  for (const auto& [vec, a] : u.cos_terms())
    rows.push_back({basis.frequency(vec), vec, "cos", a});
  for (const auto& [vec, b] : u.sin_terms())
    rows.push_back({basis.frequency(vec), vec, "sin", b});
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.freq != y.freq) return x.freq < y.freq;
    if (x.vec != y.vec) return x.vec < y.vec;
    return std::string_view(x.kind) < std::string_view(y.kind);
  });
  for (const auto& r : rows) {
    json t;
    t["coeffs"] = vec_to_json(r.vec);
    t["kind"] = r.kind;
    t["value"] = r.value;
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

TrigSum trigsum_from_json(const json& j, const BasisPtr& basis) {
  TrigSum u(basis, j.at("mean").get<double>());
  for (const auto& t : j.at("terms")) {
    const std::string kind = t.at("kind").get<std::string>();
    u.accumulate(kind == "cos" ? ModeKind::Cos : ModeKind::Sin,
                 vec_from_json(t.at("coeffs")), t.at("value").get<double>());
  }
  u.sparsify();
  return u;
}

json params_to_json(const WaveParams& p) {
  json j;
  j["gamma"] = p.gamma;
  j["g"] = p.g;
  j["h"] = p.h;
  return j;
}

WaveParams params_from_json(const json& j) {
  WaveParams p;
  p.gamma = j.at("gamma").get<double>();
  p.g = j.at("g").get<double>();
  p.h = j.at("h").get<double>();
  p.validate();
  return p;
}

json mode_to_json(const ModeId& m) {
  json j;
  j["coeffs"] = vec_to_json(m.vec);
  j["kind"] = to_string(m.kind);
  j["frequency"] = m.freq;
  return j;
}

ModeId mode_from_json(const json& j, const GeneratorBasis& basis,
                      const AdmissiblePair& pair) {
  ModeId m;
  m.vec = vec_from_json(j.at("coeffs"));
  const std::string kind = j.at("kind").get<std::string>();
  m.kind = (kind == "cos") ? ModeKind::Cos
           : (kind == "sin") ? ModeKind::Sin
                             : ModeKind::Mean;
  m.freq = basis.frequency(m.vec);
  if (classify(pair, m.vec) != m.kind)
    throw std::invalid_argument("mode: kind '" + kind +
                                "' is inconsistent with the pair's classes");
  return m;
}

json config_to_json(const BranchConfig& cfg) {
  json j;
  j["pair"] = pair_to_json(cfg.pair);
  j["k0"] = mode_to_json(cfg.k0);
  j["root_sign"] = cfg.root_sign;
  j["s_max"] = cfg.s_max;
  j["n_steps"] = cfg.n_steps;
  j["newton_tol"] = cfg.newton_tol;
  j["newton_max_iter"] = cfg.newton_max_iter;
  j["cutoff"] = cfg.cutoff;
  j["resonance_tol"] = cfg.resonance_tol;
  j["include_negative"] = cfg.include_negative;
  return j;
}

BranchConfig config_from_json(const json& j) {
  BranchConfig cfg;
  cfg.pair = pair_from_json(j.at("pair"));
  cfg.root_sign = j.at("root_sign").get<int>();
  cfg.s_max = j.at("s_max").get<double>();
  cfg.n_steps = j.at("n_steps").get<int>();
  cfg.newton_tol = j.at("newton_tol").get<double>();
  cfg.newton_max_iter = j.at("newton_max_iter").get<int>();
  cfg.cutoff = j.at("cutoff").get<double>();
  cfg.resonance_tol = j.at("resonance_tol").get<double>();
  cfg.include_negative = j.at("include_negative").get<bool>();
  cfg.k0 = mode_from_json(j.at("k0"), *cfg.pair.basis, cfg.pair);
  cfg.validate();
  return cfg;
}

json point_to_json(const BranchPoint& pt, const WaveParams& p) {
  json j;
  j["s"] = pt.s;
  j["lambda"] = pt.lambda;
  j["mu"] = pt.mu;
  j["residual_norm"] = pt.residual_norm;
  j["newton_iters"] = pt.newton_iters;
  j["truncation_mass"] = pt.truncation_mass;
  j["min_surface"] = pt.min_surface;
  j["stagnation"] = stagnation_indicator(p, pt.lambda);
  j["w"] = trigsum_to_json(pt.w);
  return j;
}

BranchPoint point_from_json(const json& j, const BasisPtr& basis) {
  BranchPoint pt;
  pt.s = j.at("s").get<double>();
  pt.lambda = j.at("lambda").get<double>();
  pt.mu = j.at("mu").get<double>();
  pt.residual_norm = j.at("residual_norm").get<double>();
  pt.newton_iters = j.at("newton_iters").get<int>();
  pt.truncation_mass = j.at("truncation_mass").get<double>();
  pt.min_surface = j.at("min_surface").get<double>();
  pt.w = trigsum_from_json(j.at("w"), basis);
  return pt;
}

json branch_to_json(const BranchFile& bf) {
  json j;
  j["format"] = "apwave-branch/1";
  j["params"] = params_to_json(bf.params);
  j["config"] = config_to_json(bf.config);
  j["lambda_star"] = bf.lambda_star;
  json pts = json::array();
  for (const auto& pt : bf.points) pts.push_back(point_to_json(pt, bf.params));
  j["points"] = pts;
  return j;
}

BranchFile branch_from_json(const json& j) {
  if (j.value("format", "") != std::string("apwave-branch/1"))
    throw std::invalid_argument("branch file: unknown or missing format tag");
  BranchFile bf;
  bf.params = params_from_json(j.at("params"));
  bf.config = config_from_json(j.at("config"));
  bf.lambda_star = j.at("lambda_star").get<double>();
  const BasisPtr basis = bf.config.effective_pair().basis;
  for (const auto& pj : j.at("points"))
    bf.points.push_back(point_from_json(pj, basis));
  return bf;
}

json report_to_json(const VerificationReport& rep) {
  json j;
  j["laplacian_residual"] = rep.laplacian_residual;
  j["laplacian_residual_fine"] = rep.laplacian_residual_fine;
  if (std::isnan(rep.laplacian_order))
    j["laplacian_order"] = nullptr;
  else
    j["laplacian_order"] = rep.laplacian_order;
  j["laplacian_at_noise_floor"] = rep.laplacian_at_noise_floor;
  j["xi_top_residual"] = rep.xi_top_residual;
  j["xi_bottom_residual"] = rep.xi_bottom_residual;
  j["bernoulli_residual"] = rep.bernoulli_residual;
  j["cauchy_riemann_residual"] = rep.cauchy_riemann_residual;
  j["conformality_margin"] = rep.conformality_margin;
  j["stagnation"] = rep.stagnation;
  j["min_speed_sq"] = rep.min_speed_sq;
  j["min_speed_at"] = {rep.stagnation_x, rep.stagnation_y};
  return j;
}

json nonuniqueness_to_json(const NonuniquenessReport& rep) {
  json j;
  j["params"] = params_to_json(rep.params);
  j["cos_config"] = config_to_json(rep.cos_config);
  j["sin_config"] = config_to_json(rep.sin_config);
  j["lambda_star"] = rep.lambda_star;
  j["sin_defect_ok"] = rep.sin_defect_ok;
  j["cos_even_exact"] = rep.cos_even_exact;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json rj;
    rj["s"] = r.s;
    rj["lambda_cos"] = r.lambda_cos;
    rj["mu_cos"] = r.mu_cos;
    rj["lambda_sin"] = r.lambda_sin;
    rj["mu_sin"] = r.mu_sin;
    rj["b2_distance"] = r.b2_distance;
    rj["evenness_defect_cos"] = r.defect_cos;
    rj["evenness_defect_sin"] = r.defect_sin;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j;
}

json almost_periodic_to_json(const AlmostPeriodicReport& rep) {
  json j;
  j["params"] = params_to_json(rep.params);
  j["config"] = config_to_json(rep.config);
  j["lambda_star"] = rep.lambda_star;
  j["k0_frequency"] = rep.k0_freq;
  json sup = json::array();
  for (const auto& v : rep.support) sup.push_back(vec_to_json(v));
  j["support"] = sup;
  j["support_rank"] = rep.support_rank;
  j["closure_rank"] = rep.closure_rank;
  j["pair_rank"] = rep.pair_rank;
  j["certificate"] = rep.certificate;
  json wit = json::array();
  for (const auto& v : rep.witness) wit.push_back(vec_to_json(v));
  j["independent_vectors"] = wit;
  j["second_harmonic_populated"] = rep.second_harmonic_populated;
  return j;
}

std::string branch_csv(const BranchFile& bf) {
  std::ostringstream os;
  os << "s,lambda,mu,residual,min_surface,stagnation_flag\n";
  for (const auto& pt : bf.points) {
    os << format_double(pt.s) << "," << format_double(pt.lambda) << ","
       << format_double(pt.mu) << "," << format_double(pt.residual_norm) << ","
       << format_double(pt.min_surface) << ","
       << (stagnation_indicator(bf.params, pt.lambda) ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string modes_csv(const std::vector<ModeId>& modes) {
  std::ostringstream os;
  os << "kind,coeffs,frequency\n";
  for (const auto& m : modes) {
    os << to_string(m.kind) << ",\"";
    const auto c = m.vec.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) os << " ";
      os << c[i];
    }
    os << "\"," << format_double(m.freq) << "\n";
  }
  return os.str();
}

std::string dispersion_csv(const WaveParams& p, const std::vector<ModeId>& modes) {
  std::ostringstream os;
  os << "k,lambda_plus,lambda_minus,residual_plus,residual_minus,"
        "transversality_plus,transversality_minus,stagnation_plus,"
        "stagnation_minus\n";
  for (const auto& m : modes) {
    if (m.kind == ModeKind::Mean) continue;
    const auto [lp, lm] = bifurcation_lambdas(p, m.freq);
    os << format_double(m.freq) << "," << format_double(lp) << ","
       << format_double(lm) << ","
       << format_double(dispersion_residual(p, lp, m.freq)) << ","
       << format_double(dispersion_residual(p, lm, m.freq)) << ","
       << format_double(transversality(p, lp, m.freq)) << ","
       << format_double(transversality(p, lm, m.freq)) << ","
       << (stagnation_indicator(p, lp) ? 1 : 0) << ","
       << (stagnation_indicator(p, lm) ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string profile_csv(const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream os;
  os << "x,eta\n";
  for (const auto& [x, v] : rows)
    os << format_double(x) << "," << format_double(v) << "\n";
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw std::ios_base::failure("read error on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw std::ios_base::failure("write error on '" + path + "'");
}

std::string json_dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace apwave
