#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wavesplit/pipeline.hpp"
#include "wavesplit/splitting.hpp"

namespace {

using namespace wavesplit;

struct GridSpec {
  int nx1 = 32, nx2 = 32;
  double L1 = 1.0, L2 = 1.0;
};

// "N1xN2:L1xL2", e.g. "32x32:1.0x1.0"
GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto colon = text.find(':');
  const std::string sizes = text.substr(0, colon);
  const auto x1 = sizes.find('x');
  if (x1 == std::string::npos) throw ConfigError("bad grid spec: " + text);
  g.nx1 = std::stoi(sizes.substr(0, x1));
  g.nx2 = std::stoi(sizes.substr(x1 + 1));
  if (colon != std::string::npos) {
    const std::string exts = text.substr(colon + 1);
    const auto x2 = exts.find('x');
    if (x2 == std::string::npos) throw ConfigError("bad grid spec: " + text);
    g.L1 = std::stod(exts.substr(0, x2));
    g.L2 = std::stod(exts.substr(x2 + 1));
  }
  if (g.nx1 < 0 || g.nx2 < 0 || !(g.L1 > 0.0) || !(g.L2 > 0.0)) {
    throw ConfigError("bad grid spec: " + text);
  }
  return g;
}

LaplaceParameter make_lp(const std::string& s_text, double sr) {
  const Complex s = parse_complex(s_text);
  const double floor = sr > 0.0 ? sr : 0.9 * s.real();
  return LaplaceParameter(s, floor);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Directional wave-field decomposition for anisotropic Maxwell "
               "media at the principal-symbol level"};
  app.require_subcommand(1);

  int threads = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  app.add_option("--threads", threads, "worker threads for grid sweeps");
  app.add_option("--seed", seed, "seed for sampled estimators");
  app.add_option("--out", out_dir, "output directory");

  // analyze-strip
  auto* strip = app.add_subcommand("analyze-strip", "strip/ellipticity constants");
  std::string strip_medium, strip_out = "report.json";
  double strip_sr = 0.5;
  std::int64_t strip_samples = 2000;
  strip->add_option("--medium", strip_medium, "medium config")->required();
  strip->add_option("--sr", strip_sr, "strip floor S_R")->required();
  strip->add_option("--samples", strip_samples, "sample count (>= 1000)");
  strip->add_option("--out", strip_out, "report path");

  // symbol-dump
  auto* sym = app.add_subcommand("symbol-dump", "principal-symbol CSV over a mode grid");
  std::string sym_medium, sym_s = "1.0", sym_lambda = "0", sym_grid = "16x16:1x1",
              sym_x = "0,0", sym_out = "symbols.csv";
  double sym_sr = 0.0;
  sym->add_option("--medium", sym_medium)->required();
  sym->add_option("--xi", sym_grid, "mode grid N1xN2:L1xL2");
  sym->add_option("--s", sym_s, "Laplace parameter, e.g. 2+1i");
  sym->add_option("--lambda", sym_lambda, "spectral parameter");
  sym->add_option("--x", sym_x, "evaluation point x1,x2");
  sym->add_option("--sr", sym_sr, "strip floor S_R (default 0.9 Re s)");
  sym->add_option("--out", sym_out);

  // split
  auto* split = app.add_subcommand("split", "splitting symbol per mode");
  std::string split_medium, split_s = "1.0", split_grid = "16x16:1x1",
              split_method = "sign", split_out = "split.csv", split_x = "0,0";
  double split_sr = 0.0;
  split->add_option("--medium", split_medium)->required();
  split->add_option("--xi", split_grid, "mode grid N1xN2:L1xL2");
  split->add_option("--s", split_s)->required();
  split->add_option("--method", split_method)->check(CLI::IsMember({"sign", "residue"}));
  split->add_option("--x", split_x, "evaluation point x1,x2");
  split->add_option("--sr", split_sr);
  split->add_option("--out", split_out);

  // propagate
  auto* prop = app.add_subcommand("propagate", "one-way propagation of a field dump");
  std::string prop_medium, prop_field, prop_out = "field_out.bin",
              prop_method = "sign";
  double prop_depth = 0.0;
  bool prop_allow_growth = false;
  prop->add_option("--medium", prop_medium)->required();
  prop->add_option("--field", prop_field, "input field dump")->required();
  prop->add_option("--depth", prop_depth, "depth step h")->required();
  prop->add_option("--method", prop_method)->check(CLI::IsMember({"sign", "residue"}));
  prop->add_flag("--allow-growth", prop_allow_growth,
                 "permit forward propagation of the growing family");
  prop->add_option("--out", prop_out);

  // validate-isotropic
  auto* iso = app.add_subcommand("validate-isotropic",
                                 "compare against the isotropic closed forms");
  std::string iso_medium, iso_s = "1.0", iso_grid = "32x32:1x1",
              iso_out = "isotropic_report.json";
  double iso_sr = 0.0;
  iso->add_option("--medium", iso_medium)->required();
  iso->add_option("--s", iso_s);
  iso->add_option("--xi", iso_grid, "mode grid N1xN2:L1xL2");
  iso->add_option("--sr", iso_sr);
  iso->add_option("--out", iso_out);

  // run
  auto* run = app.add_subcommand("run", "batch pipeline from a config file");
  std::string run_config;
  run->add_option("--config", run_config, "run config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  auto in_out = [&](const std::string& name) {
    return std::filesystem::path(name).is_absolute() || out_dir == "."
               ? name
               : out_dir + "/" + name;
  };

  if (strip->parsed()) {
    const MediumSpec m = load_medium(strip_medium);
    const StripReport rep = ellipticity_estimate(m, strip_sr, strip_samples, seed);
    write_strip_report(rep, in_out(strip_out));
    std::cout << "tau=" << rep.tau << " C0=" << rep.C0 << " Ce=" << rep.Ce
              << " C1=" << rep.C1 << " R=" << rep.R << "\n";
    return 0;
  }
  if (sym->parsed()) {
    const MediumSpec m = load_medium(sym_medium);
    const GridSpec g = parse_grid(sym_grid);
    const auto comma = sym_x.find(',');
    if (comma == std::string::npos) throw ConfigError("--x must be \"x1,x2\"");
    const Vec2 x(std::stod(sym_x.substr(0, comma)), std::stod(sym_x.substr(comma + 1)));
    std::ofstream os(in_out(sym_out));
    if (!os) throw ConfigError("cannot write " + sym_out);
    stage_symbol_dump(m, x, g.nx1, g.nx2, g.L1, g.L2, make_lp(sym_s, sym_sr),
                      parse_complex(sym_lambda), os);
    return 0;
  }
  if (split->parsed()) {
    const MediumSpec m = load_medium(split_medium);
    const GridSpec g = parse_grid(split_grid);
    const auto comma = split_x.find(',');
    if (comma == std::string::npos) throw ConfigError("--x must be \"x1,x2\"");
    const Vec2 x(std::stod(split_x.substr(0, comma)),
                 std::stod(split_x.substr(comma + 1)));
    std::ofstream os(in_out(split_out));
    if (!os) throw ConfigError("cannot write " + split_out);
    stage_split(m, x, g.nx1, g.nx2, g.L1, g.L2, make_lp(split_s, split_sr),
                split_method == "residue" ? SplitMethod::residue : SplitMethod::sign,
                os, threads);
    return 0;
  }
  if (prop->parsed()) {
    const MediumSpec m = load_medium(prop_medium);
    const FieldGrid f = read_field_dump(prop_field);
    DecomposeOptions dopt;
    dopt.method = prop_method == "residue" ? SplitMethod::residue : SplitMethod::sign;
    PropagateOptions popt;
    popt.method = dopt.method;
    popt.allow_growth = prop_allow_growth;
    const FieldGrid f2 =
        recompose(propagate_oneway(decompose(f, m, dopt), m, prop_depth, popt), m, dopt);
    write_field_dump(f2, in_out(prop_out));
    return 0;
  }
  if (iso->parsed()) {
    const MediumSpec m = load_medium(iso_medium);
    const GridSpec g = parse_grid(iso_grid);
    const IsotropicReport rep = run_validate_isotropic(
        m, make_lp(iso_s, iso_sr), g.nx1, g.nx2, g.L1, g.L2);
    write_isotropic_report(rep, in_out(iso_out));
    std::cout << "modes=" << rep.modes_checked
              << " err_b0_residue=" << rep.err_b0_residue
              << " err_b0_sign=" << rep.err_b0_sign
              << " err_roots=" << rep.err_roots << " err_s=" << rep.err_s
              << " err_y=" << rep.err_y << "\n";
    return 0;
  }
  if (run->parsed()) {
    RunConfig cfg = load_run_config(run_config);
    if (seed != 0) cfg.seed = seed;
    run_pipeline(cfg, std::cout);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericGuardError& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
