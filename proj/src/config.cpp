#include "wavesplit/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wavesplit {

using nlohmann::json;

namespace {

json parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

Mat3d matrix3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(what + ": expected a 3x3 matrix (array of 3 rows)");
  }
  Mat3d t;
  for (int r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) {
      throw ConfigError(what + ": row " + std::to_string(r) + " is not length 3");
    }
    for (int c = 0; c < 3; ++c) t(r, c) = j[r][c].get<double>();
  }
  return t;
}

MaterialTensor tensor_from_json(const json& j, const std::string& what) {
  const std::string profile = j.value("profile", std::string("constant"));
  if (profile == "constant") {
    if (j.contains("matrix")) return MaterialTensor(matrix3(j["matrix"], what));
    if (j.contains("scalar")) {
      return MaterialTensor(Mat3d(j["scalar"].get<double>() * Mat3d::Identity()));
    }
    throw ConfigError(what + ": constant profile needs \"matrix\" or \"scalar\"");
  }
  if (profile == "affine") {
    const Mat3d base = matrix3(j.at("base"), what + ".base");
    const Mat3d delta = matrix3(j.at("delta"), what + ".delta");
    if (!j.contains("gradient") || j["gradient"].size() != 2) {
      throw ConfigError(what + ": affine profile needs a 2-vector \"gradient\"");
    }
    const Vec2 g(j["gradient"][0].get<double>(), j["gradient"][1].get<double>());
    return MaterialTensor([base, delta, g](const Vec2& x) {
      return Mat3d(base + g.dot(x) * delta);
    });
  }
  if (profile == "gaussian_bump") {
    const Mat3d base = matrix3(j.at("base"), what + ".base");
    const Mat3d delta = matrix3(j.at("delta"), what + ".delta");
    const double amp = j.value("amplitude", 1.0);
    const double width = j.at("width").get<double>();
    if (!(width > 0.0)) throw ConfigError(what + ": width must be positive");
    Vec2 center(0.0, 0.0);
    if (j.contains("center")) {
      center = Vec2(j["center"][0].get<double>(), j["center"][1].get<double>());
    }
    return MaterialTensor([base, delta, amp, width, center](const Vec2& x) {
      const double r2 = (x - center).squaredNorm();
      return Mat3d(base + amp * std::exp(-r2 / (2.0 * width * width)) * delta);
    });
  }
  throw ConfigError(what + ": unknown profile \"" + profile + "\"");
}

SampleLattice lattice_from_json(const json& j) {
  SampleLattice lat;
  lat.lo = Vec2(-0.5, -0.5);
  lat.hi = Vec2(0.5, 0.5);
  lat.n1 = lat.n2 = 5;
  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    if (l.contains("extent1")) {
      lat.lo[0] = l["extent1"][0].get<double>();
      lat.hi[0] = l["extent1"][1].get<double>();
    }
    if (l.contains("extent2")) {
      lat.lo[1] = l["extent2"][0].get<double>();
      lat.hi[1] = l["extent2"][1].get<double>();
    }
    lat.n1 = l.value("n1", 5);
    lat.n2 = l.value("n2", 5);
  }
  if (lat.n1 < 1 || lat.n2 < 1) throw ConfigError("lattice: n1, n2 must be >= 1");
  return lat;
}

}  // namespace

MediumSpec load_medium(const std::string& path) {
  const json j = parse_file(path);
  if (!j.contains("eps") || !j.contains("mu")) {
    throw ConfigError(path + ": medium config needs \"eps\" and \"mu\"");
  }
  MaterialTensor eps = tensor_from_json(j["eps"], "eps");
  MaterialTensor mu = tensor_from_json(j["mu"], "mu");
  const SampleLattice lat = lattice_from_json(j);
  const std::string units = j.value("units", std::string("normalized"));
  if (units == "si") {
    auto rel = [](MaterialTensor t, double unit) {
      if (t.is_constant()) return MaterialTensor(Mat3d(t.eval(Vec2::Zero()) / unit));
      return MaterialTensor([t, unit](const Vec2& x) { return Mat3d(t.eval(x) / unit); });
    };
    eps = rel(std::move(eps), kVacuumPermittivity);
    mu = rel(std::move(mu), kVacuumPermeability);
  } else if (units != "normalized") {
    throw ConfigError(path + ": units must be \"si\" or \"normalized\"");
  }
  return MediumSpec::create(std::move(eps), std::move(mu), lat);
}

Complex parse_complex(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  }
  if (t.empty()) throw ConfigError("empty complex literal");
  // pure imaginary or real fast paths handled by the general scan
  double re = 0.0, im = 0.0;
  std::size_t pos = 0;
  try {
    re = std::stod(t, &pos);
  } catch (...) {
    throw ConfigError("cannot parse complex literal: \"" + text + "\"");
  }
  if (pos == t.size()) return Complex(re, 0.0);
  if (t[pos] == 'i' || t[pos] == 'j') {
    if (pos + 1 != t.size()) {
      throw ConfigError("cannot parse complex literal: \"" + text + "\"");
    }
    return Complex(0.0, re);
  }
  std::string rest = t.substr(pos);
  if (rest.back() != 'i' && rest.back() != 'j') {
    throw ConfigError("cannot parse complex literal: \"" + text + "\"");
  }
  rest.pop_back();
  if (rest == "+" || rest == "-") rest += "1";
  std::size_t pos2 = 0;
  try {
    im = std::stod(rest, &pos2);
  } catch (...) {
    throw ConfigError("cannot parse complex literal: \"" + text + "\"");
  }
  if (pos2 != rest.size()) {
    throw ConfigError("cannot parse complex literal: \"" + text + "\"");
  }
  return Complex(re, im);
}

RunConfig load_run_config(const std::string& path) {
  const json j = parse_file(path);
  RunConfig cfg;
  cfg.medium_path = j.at("medium").get<std::string>();
  if (j.contains("grid")) {
    const json& g = j["grid"];
    cfg.nx1 = g.value("nx1", 32);
    cfg.nx2 = g.value("nx2", 32);
    cfg.L1 = g.value("L1", 1.0);
    cfg.L2 = g.value("L2", 1.0);
  }
  if (!j.contains("s")) throw ConfigError(path + ": needs an \"s\" list");
  for (const auto& sv : j["s"]) {
    cfg.s_list.push_back(sv.is_string() ? parse_complex(sv.get<std::string>())
                                        : Complex(sv.get<double>(), 0.0));
  }
  cfg.S_R = j.value("sr", 0.0);
  cfg.method = j.value("method", std::string("sign"));
  if (cfg.method != "sign" && cfg.method != "residue") {
    throw ConfigError(path + ": method must be \"sign\" or \"residue\"");
  }
  cfg.seed = j.value("seed", 0ULL);
  cfg.out_dir = j.value("out", std::string("out"));
  if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty()) {
    throw ConfigError(path + ": needs a non-empty \"stages\" list");
  }
  for (const auto& st : j["stages"]) cfg.stages.push_back(st.get<std::string>());
  if (j.contains("strip")) cfg.strip_samples = j["strip"].value("samples", 2000);
  if (j.contains("propagate")) {
    const json& p = j["propagate"];
    cfg.depth = p.value("depth", 0.1);
    cfg.allow_growth = p.value("allow_growth", false);
    if (p.contains("field")) {
      const json& f = p["field"];
      cfg.field_dump = f.value("dump", std::string());
      cfg.field_preset = f.value("preset", std::string("gaussian"));
    }
  }
  if (j.contains("symbol_dump")) {
    const json& sd = j["symbol_dump"];
    cfg.lambda_re = sd.value("lambda_re", 0.0);
    cfg.lambda_im = sd.value("lambda_im", 0.0);
  }
  for (const Complex& s : cfg.s_list) {
    const double floor = cfg.S_R > 0.0 ? cfg.S_R : 0.9 * s.real();
    if (!(s.real() > floor) || !(floor > 0.0)) {
      std::ostringstream os;
      os << path << ": s = " << s.real() << "+" << s.imag()
         << "i violates Re s > S_R > 0";
      throw ConfigError(os.str());
    }
  }
  cfg.raw_json = j.dump();  // keys sorted by nlohmann -> canonical
  return cfg;
}

LaplaceParameter laplace_for(const RunConfig& cfg, Complex s) {
  const double floor = cfg.S_R > 0.0 ? cfg.S_R : 0.9 * s.real();
  return LaplaceParameter(s, floor);
}

}  // namespace wavesplit
