#pragma once

#include <iosfwd>

#include "wavesplit/config.hpp"
#include "wavesplit/fields.hpp"
#include "wavesplit/spectrum.hpp"

namespace wavesplit {

void write_strip_report(const StripReport& rep, const std::string& path);

/// CSV dump of the principal symbol over a mode grid at fixed (x, s, lambda):
/// (x1, x2, xi1, xi2, Re s, Im s, Re lambda, Im lambda, 32 block-entry columns,
/// Re det, Im det).
void stage_symbol_dump(const MediumSpec& m, const Vec2& x, int nx1, int nx2,
                       double L1, double L2, const LaplaceParameter& lp,
                       Complex lambda, std::ostream& os);

/// Per-mode split data: b0, s+-, Y+-, Riccati residual norms, involution and
/// commutation residuals. One CSV row per mode; deterministic row order.
void stage_split(const MediumSpec& m, const Vec2& x, int nx1, int nx2, double L1,
                 double L2, const LaplaceParameter& lp, SplitMethod method,
                 std::ostream& os, int threads = 1);

/// Max relative errors of the computed quantities against the homogeneous
/// isotropic closed forms, over an nx1 x nx2 mode grid.
struct IsotropicReport {
  double err_b0_residue = 0.0;
  double err_b0_sign = 0.0;
  double err_roots = 0.0;
  double err_s = 0.0;
  double err_y = 0.0;
  std::int64_t modes_checked = 0;
};

/// Refuses non-isotropic or heterogeneous media with ConfigError.
IsotropicReport run_validate_isotropic(const MediumSpec& m,
                                       const LaplaceParameter& lp, int nx1,
                                       int nx2, double L1, double L2);

void write_isotropic_report(const IsotropicReport& rep, const std::string& path);

/// Deterministic built-in field preset for the propagate stage.
FieldGrid make_preset_field(const std::string& preset, int nx1, int nx2,
                            double L1, double L2, const LaplaceParameter& lp,
                            std::uint64_t seed);

/// Executes the configured stages in order with content-addressed caching.
/// Unchanged stages are skipped without touching their outputs.
void run_pipeline(const RunConfig& cfg, std::ostream& log);

}  // namespace wavesplit
