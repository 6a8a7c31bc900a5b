#include "wavesplit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "wavesplit/parallel.hpp"
#include "wavesplit/splitting.hpp"

namespace wavesplit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Complex kI{0.0, 1.0};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_complex_cols(std::string& row, const Mat2& m) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      row += "," + fmt17(m(r, c).real()) + "," + fmt17(m(r, c).imag());
    }
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_strip_report(const StripReport& rep, const std::string& path) {
  json j;
  j["tau"] = rep.tau;
  j["C0"] = rep.C0;
  j["Ce"] = rep.Ce;
  j["C1"] = rep.C1;
  j["R"] = rep.R;
  j["samples_checked"] = rep.samples_checked;
  j["eps_hat1"] = rep.eps_hat1;
  j["mu_hat1"] = rep.mu_hat1;
  j["s_R"] = rep.S_R;
  j["root_gap_ratio"] = rep.root_gap_ratio;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << j.dump(2) << "\n";
}

void stage_symbol_dump(const MediumSpec& m, const Vec2& x, int nx1, int nx2,
                       double L1, double L2, const LaplaceParameter& lp,
                       Complex lambda, std::ostream& os) {
  os << "x1,x2,xi1,xi2,re_s,im_s,re_lambda,im_lambda";
  const char* blocks[4] = {"a11", "a12", "a21", "a22"};
  for (const char* b : blocks)
    for (int r = 1; r <= 2; ++r)
      for (int c = 1; c <= 2; ++c)
        os << ",re_" << b << "_" << r << c << ",im_" << b << "_" << r << c;
  os << ",re_det,im_det\n";
  for (int k1 = 0; k1 < nx1; ++k1) {
    for (int k2 = 0; k2 < nx2; ++k2) {
      const int f1 = k1 <= nx1 / 2 ? k1 : k1 - nx1;
      const int f2 = k2 <= nx2 / 2 ? k2 : k2 - nx2;
      const Vec2 xi(2.0 * M_PI * f1 / L1, 2.0 * M_PI * f2 / L2);
      const SymbolPoint sp = principal_symbol(m, x, xi, lp.s, lambda);
      std::string row = fmt17(x[0]) + "," + fmt17(x[1]) + "," + fmt17(xi[0]) +
                        "," + fmt17(xi[1]) + "," + fmt17(lp.s.real()) + "," +
                        fmt17(lp.s.imag()) + "," + fmt17(lambda.real()) + "," +
                        fmt17(lambda.imag());
      append_complex_cols(row, sp.a11);
      append_complex_cols(row, sp.a12);
      append_complex_cols(row, sp.a21);
      append_complex_cols(row, sp.a22);
      const Complex det = det_alpha_direct(sp);
      row += "," + fmt17(det.real()) + "," + fmt17(det.imag());
      os << row << "\n";
    }
  }
}

void stage_split(const MediumSpec& m, const Vec2& x, int nx1, int nx2, double L1,
                 double L2, const LaplaceParameter& lp, SplitMethod method,
                 std::ostream& os, int threads) {
  os << "k1,k2,xi1,xi2";
  for (int r = 1; r <= 4; ++r)
    for (int c = 1; c <= 4; ++c) os << ",re_b0_" << r << c << ",im_b0_" << r << c;
  const char* m2[4] = {"s_plus", "s_minus", "y_plus", "y_minus"};
  for (const char* name : m2)
    for (int r = 1; r <= 2; ++r)
      for (int c = 1; c <= 2; ++c)
        os << ",re_" << name << "_" << r << c << ",im_" << name << "_" << r << c;
  os << ",riccati_resid_plus,riccati_resid_minus,involution_resid,commutation_resid\n";

  const std::int64_t n_modes = static_cast<std::int64_t>(nx1) * nx2;
  std::vector<std::string> rows(n_modes);
  parallel_for(n_modes, threads, [&](std::int64_t idx) {
    const int k1 = static_cast<int>(idx / nx2);
    const int k2 = static_cast<int>(idx % nx2);
    const int f1 = k1 <= nx1 / 2 ? k1 : k1 - nx1;
    const int f2 = k2 <= nx2 / 2 ? k2 : k2 - nx2;
    const Vec2 xi(2.0 * M_PI * f1 / L1, 2.0 * M_PI * f2 / L2);
    const SplitSymbol ss = splitting_symbol(method, m, x, xi, lp);
    const SymbolPoint a = principal_symbol(m, x, xi, lp.s, Complex(0.0, 0.0));
    const SplitBasis basis = split_basis(ss, a, Normalization::identity);
    const RiccatiResult ric = impedance_and_riccati(ss, a);

    std::string row = std::to_string(k1) + "," + std::to_string(k2) + "," +
                      fmt17(xi[0]) + "," + fmt17(xi[1]);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        row += "," + fmt17(ss.b0(r, c).real()) + "," + fmt17(ss.b0(r, c).imag());
      }
    append_complex_cols(row, basis.s_plus);
    append_complex_cols(row, basis.s_minus);
    append_complex_cols(row, ric.y_plus);
    append_complex_cols(row, ric.y_minus);
    const Mat4 a1 = a.a1();
    const double invol = (ss.b0 * ss.b0 - Mat4::Identity()).norm();
    const double commut = (ss.b0 * a1 - a1 * ss.b0).norm();
    row += "," + fmt17(ric.residual_plus) + "," + fmt17(ric.residual_minus) +
           "," + fmt17(invol) + "," + fmt17(commut);
    rows[idx] = std::move(row);
  });
  for (const std::string& row : rows) os << row << "\n";
}

namespace {

struct IsoScalars {
  double eps = 1.0;
  double mu = 1.0;
};

IsoScalars isotropic_scalars(const MediumSpec& m) {
  if (!m.homogeneous) {
    throw ConfigError("validate-isotropic: medium must be homogeneous");
  }
  const Mat3d e = m.eps.eval(Vec2::Zero());
  const Mat3d mu = m.mu.eval(Vec2::Zero());
  auto is_scalar = [](const Mat3d& t) {
    const double d = t(0, 0);
    return (t - d * Mat3d::Identity()).cwiseAbs().maxCoeff() <= 1e-14 * std::abs(d);
  };
  if (!is_scalar(e) || !is_scalar(mu)) {
    throw ConfigError("validate-isotropic: medium is anisotropic");
  }
  return {e(0, 0), mu(0, 0)};
}

double rel_err(const Mat2& got, const Mat2& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

IsotropicReport run_validate_isotropic(const MediumSpec& m,
                                       const LaplaceParameter& lp, int nx1,
                                       int nx2, double L1, double L2) {
  const IsoScalars iso = isotropic_scalars(m);
  IsotropicReport rep;
  for (int k1 = 0; k1 < nx1; ++k1) {
    for (int k2 = 0; k2 < nx2; ++k2) {
      const int f1 = k1 <= nx1 / 2 ? k1 : k1 - nx1;
      const int f2 = k2 <= nx2 / 2 ? k2 : k2 - nx2;
      const Vec2 xi(2.0 * M_PI * f1 / L1, 2.0 * M_PI * f2 / L2);
      const Complex w =
          std::sqrt(lp.s * lp.s * iso.eps * iso.mu + Complex(xi.squaredNorm()));
      const SymbolPoint a = principal_symbol(m, Vec2::Zero(), xi, lp.s,
                                             Complex(0.0, 0.0));
      const Mat2 z = a.a12 / w;
      Mat4 b_want = Mat4::Zero();
      b_want.block<2, 2>(0, 2) = z;
      b_want.block<2, 2>(2, 0) = z.inverse();

      const SplitSymbol sr = splitting_symbol_residue(m, Vec2::Zero(), xi, lp);
      const SplitSymbol sg = splitting_symbol_sign(m, Vec2::Zero(), xi, lp);
      const double bscale = b_want.cwiseAbs().maxCoeff();
      rep.err_b0_residue = std::max(rep.err_b0_residue,
                                    (sr.b0 - b_want).cwiseAbs().maxCoeff() / bscale);
      rep.err_b0_sign = std::max(rep.err_b0_sign,
                                 (sg.b0 - b_want).cwiseAbs().maxCoeff() / bscale);

      for (const Complex& r : {sr.roots.plus[0], sr.roots.plus[1]}) {
        rep.err_roots = std::max(rep.err_roots, std::abs(r - w) / std::abs(w));
      }
      for (const Complex& r : {sr.roots.minus[0], sr.roots.minus[1]}) {
        rep.err_roots = std::max(rep.err_roots, std::abs(r + w) / std::abs(w));
      }

      const SplitBasis basis = split_basis(sr, a, Normalization::identity);
      const Mat2 s_want = w * Mat2::Identity();
      rep.err_s = std::max(rep.err_s, rel_err(basis.s_plus, s_want));
      rep.err_s = std::max(rep.err_s, rel_err(basis.s_minus, Mat2(-s_want)));

      const RiccatiResult ric = impedance_and_riccati(sr, a);
      rep.err_y = std::max(rep.err_y, rel_err(ric.y_plus, z));
      rep.err_y = std::max(rep.err_y, rel_err(ric.y_minus, Mat2(-z)));
      ++rep.modes_checked;
    }
  }
  return rep;
}

void write_isotropic_report(const IsotropicReport& rep, const std::string& path) {
  json j;
  j["err_b0_residue"] = rep.err_b0_residue;
  j["err_b0_sign"] = rep.err_b0_sign;
  j["err_roots"] = rep.err_roots;
  j["err_s"] = rep.err_s;
  j["err_y"] = rep.err_y;
  j["modes_checked"] = rep.modes_checked;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << j.dump(2) << "\n";
}

FieldGrid make_preset_field(const std::string& preset, int nx1, int nx2,
                            double L1, double L2, const LaplaceParameter& lp,
                            std::uint64_t seed) {
  FieldGrid f(nx1, nx2, L1, L2, lp);
  if (preset == "gaussian") {
    const double w1 = L1 / 8.0, w2 = L2 / 8.0;
    for (int c = 0; c < 4; ++c) {
      const double phase = 0.25 * M_PI * (c + 1) + 1e-3 * static_cast<double>(seed % 97);
      for (int i1 = 0; i1 < nx1; ++i1) {
        for (int i2 = 0; i2 < nx2; ++i2) {
          const Vec2 x = f.grid_point(i1, i2);
          const double g1 = x[0] - L1 / 2.0, g2 = x[1] - L2 / 2.0;
          const double env = std::exp(-g1 * g1 / (2 * w1 * w1) - g2 * g2 / (2 * w2 * w2));
          f.at(c, i1, i2) = env * std::exp(kI * (phase + 2.0 * M_PI * (x[0] / L1 + x[1] / L2)));
        }
      }
    }
    return f;
  }
  if (preset == "plane_wave") {
    for (int c = 0; c < 4; ++c) {
      for (int i1 = 0; i1 < nx1; ++i1) {
        for (int i2 = 0; i2 < nx2; ++i2) {
          const Vec2 x = f.grid_point(i1, i2);
          f.at(c, i1, i2) = std::exp(kI * 2.0 * M_PI * (x[0] / L1)) * (c == 0 ? 1.0 : 0.5);
        }
      }
    }
    return f;
  }
  throw ConfigError("unknown field preset \"" + preset + "\"");
}

void run_pipeline(const RunConfig& cfg, std::ostream& log) {
  const MediumSpec medium = load_medium(cfg.medium_path);
  const std::string medium_bytes = read_file_bytes(cfg.medium_path);
  fs::create_directories(cfg.out_dir);

  const std::string manifest_path = cfg.out_dir + "/manifest.json";
  json manifest;
  if (fs::exists(manifest_path)) {
    try {
      manifest = json::parse(read_file_bytes(manifest_path));
    } catch (...) {
      manifest = json::object();
    }
  }

  // Declared stage dependencies.
  auto require_before = [&](const std::string& stage, const std::string& dep,
                            std::size_t idx) {
    for (std::size_t j = 0; j < idx; ++j) {
      if (cfg.stages[j] == dep) return;
    }
    throw ConfigError("stage \"" + stage + "\" requires stage \"" + dep +
                      "\" earlier in the stage list");
  };

  std::uint64_t chain = fnv1a(cfg.raw_json, fnv1a(medium_bytes));
  const SplitMethod method =
      cfg.method == "residue" ? SplitMethod::residue : SplitMethod::sign;

  for (std::size_t idx = 0; idx < cfg.stages.size(); ++idx) {
    const std::string& stage = cfg.stages[idx];
    if (stage == "propagate") require_before(stage, "split", idx);
    chain = fnv1a(stage, chain);
    const std::string stage_hash = hex64(chain);

    std::vector<std::string> outputs;
    if (stage == "analyze-strip") {
      outputs = {cfg.out_dir + "/strip_report.json"};
    } else if (stage == "symbol-dump") {
      for (std::size_t i = 0; i < cfg.s_list.size(); ++i)
        outputs.push_back(cfg.out_dir + "/symbols_s" + std::to_string(i) + ".csv");
    } else if (stage == "split") {
      for (std::size_t i = 0; i < cfg.s_list.size(); ++i)
        outputs.push_back(cfg.out_dir + "/split_s" + std::to_string(i) + ".csv");
    } else if (stage == "propagate") {
      outputs = {cfg.out_dir + "/field_out.bin", cfg.out_dir + "/field_out.csv"};
    } else if (stage == "validate-isotropic") {
      outputs = {cfg.out_dir + "/isotropic_report.json"};
    } else {
      throw ConfigError("unknown stage \"" + stage + "\"");
    }

    const std::string key = "stage:" + stage;
    const bool cached = manifest.contains(key) &&
                        manifest[key].value("hash", std::string()) == stage_hash &&
                        std::all_of(outputs.begin(), outputs.end(),
                                    [](const std::string& p) { return fs::exists(p); });
    if (cached) {
      log << "[cache] " << stage << " up to date (" << stage_hash << ")\n";
      continue;
    }

    log << "[run  ] " << stage << " (" << stage_hash << ")\n";
    if (stage == "analyze-strip") {
      const double sr = cfg.S_R > 0.0 ? cfg.S_R
                                      : 0.9 * cfg.s_list.front().real();
      const StripReport rep =
          ellipticity_estimate(medium, sr, cfg.strip_samples, cfg.seed);
      write_strip_report(rep, outputs[0]);
    } else if (stage == "symbol-dump") {
      for (std::size_t i = 0; i < cfg.s_list.size(); ++i) {
        std::ofstream os(outputs[i]);
        if (!os) throw ConfigError("cannot write " + outputs[i]);
        stage_symbol_dump(medium, Vec2::Zero(), cfg.nx1, cfg.nx2, cfg.L1, cfg.L2,
                          laplace_for(cfg, cfg.s_list[i]),
                          Complex(cfg.lambda_re, cfg.lambda_im), os);
      }
    } else if (stage == "split") {
      for (std::size_t i = 0; i < cfg.s_list.size(); ++i) {
        std::ofstream os(outputs[i]);
        if (!os) throw ConfigError("cannot write " + outputs[i]);
        stage_split(medium, Vec2::Zero(), cfg.nx1, cfg.nx2, cfg.L1, cfg.L2,
                    laplace_for(cfg, cfg.s_list[i]), method, os);
      }
    } else if (stage == "propagate") {
      const LaplaceParameter lp = laplace_for(cfg, cfg.s_list.front());
      FieldGrid f = cfg.field_dump.empty()
                        ? make_preset_field(cfg.field_preset, cfg.nx1, cfg.nx2,
                                            cfg.L1, cfg.L2, lp, cfg.seed)
                        : read_field_dump(cfg.field_dump);
      DecomposeOptions dopt;
      dopt.method = method;
      PropagateOptions popt;
      popt.method = method;
      popt.allow_growth = cfg.allow_growth;
      const WaveGrid w = decompose(f, medium, dopt);
      const WaveGrid w2 = propagate_oneway(w, medium, cfg.depth, popt);
      const FieldGrid f2 = recompose(w2, medium, dopt);
      write_field_dump(f2, outputs[0]);
      std::ofstream os(outputs[1]);
      if (!os) throw ConfigError("cannot write " + outputs[1]);
      write_field_csv(f2, os);
    } else if (stage == "validate-isotropic") {
      const IsotropicReport rep = run_validate_isotropic(
          medium, laplace_for(cfg, cfg.s_list.front()), cfg.nx1, cfg.nx2, cfg.L1,
          cfg.L2);
      write_isotropic_report(rep, outputs[0]);
    }

    manifest[key] = {{"hash", stage_hash}, {"outputs", outputs}};
    std::ofstream os(manifest_path);
    if (!os) throw ConfigError("cannot write " + manifest_path);
    os << manifest.dump(2) << "\n";
  }
}

}  // namespace wavesplit
