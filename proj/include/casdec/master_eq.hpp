#pragma once

// Density matrix of a trapped electron between the plates on a position grid,
// evolved with the bremsstrahlung master equation
//
//   d rho/dt = -i [H, rho] - (i alpha W^2 / 3m) [x, {p, rho}] - (alpha W^3 / 3) [x, [x, rho]],
//   H = p^2 / 2m + m W^2 x^2 / 2,  W = Omega_eff,
//
// in reduced units. Written out on rho(x, y):
//   (i/2m)(d_x^2 - d_y^2) rho - (i m W^2/2)(x^2 - y^2) rho
//   - (alpha W^2 / 3m)(x - y)(d_x - d_y) rho - (alpha W^3 / 3)(x - y)^2 rho.

#include <complex>
#include <string>
#include <vector>

#include "casdec/decoherence.hpp"
#include "casdec/units.hpp"

namespace casdec::meq {

using cplx = std::complex<double>;

/// rho(x_i, x_j) on x_i = -a + i dx, i = 0..n-1, stored row-major.
class DensityMatrixGrid {
 public:
  DensityMatrixGrid() = default;
  DensityMatrixGrid(int n_points, double half_width);

  /// Pure Gaussian wave packet exp(-(x - x0)^2 / (4 sigma^2) + i p0 x), normalised.
  static DensityMatrixGrid gaussian(int n_points, double half_width, double x0, double sigma, double p0 = 0.0);
  /// Equal-weight superposition of Gaussians centred at -d and +d, normalised.
  static DensityMatrixGrid two_gaussian(int n_points, double half_width, double d, double sigma);

  int n_points() const { return n_; }
  double half_width() const { return a_; }
  double dx() const { return dx_; }
  double x(int i) const { return -a_ + dx_ * i; }

  cplx& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * n_ + j]; }
  const cplx& operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * n_ + j]; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  double trace() const;
  double mean_x() const;
  double hermiticity_error() const;
  double min_diagonal() const;
  double min_eigenvalue() const;  // of rho dx
  void normalize();
  /// Throws InputError unless Hermitian to 1e-12, trace 1 to 1e-9 and diagonal >= -1e-10.
  void validate() const;

 private:
  int n_ = 0;
  double a_ = 0.0;
  double dx_ = 0.0;
  std::vector<cplx> values_;
};

struct OscillatorParams {
  double omega_eff = 1.0;
  double mass = 1.0;
  double alpha = kCodataAlpha;  // 0 switches off the field coupling

  void validate() const;
};

/// Defaults used by the CLI: 256 points on [-1/4, 1/4], ground-state width of
/// four grid spacings at Omega_eff = 1.
struct GridDefaults {
  static constexpr int n_points = 256;
  static constexpr double half_width = 0.25;
  static double sigma() { return 4.0 * (2.0 * half_width / (n_points - 1)); }
  static double mass(double omega) { return 1.0 / (2.0 * sigma() * sigma() * omega); }
};

struct EvolutionTerms {
  bool unitary = true;
  bool friction = true;
  bool dephasing = true;
  /// Damps coherences reaching the outer `absorb_fraction` of the grid with
  /// -kappa (g(x) - g(y))^2 rho, g rising from 0 to 1 across the layer. This
  /// keeps the trace exact and the generator of Lindblad form.
  bool absorbing = true;
  double absorb_fraction = 0.05;
  double absorb_rate = 50.0;  // kappa in units of Omega_eff
};

struct EvolutionOptions {
  EvolutionTerms terms;
  long record_every = 0;          // 0: record only the initial and final states
  long eigen_every = 0;           // 0: never compute the smallest eigenvalue
  double abort_trace_drift = 1e-8;
};

struct StepRecord {
  double t = 0.0;
  double trace = 0.0;
  double mean_x = 0.0;
  double hermiticity = 0.0;
  bool has_eigenvalue = false;
  double min_eigenvalue = 0.0;
};

struct EvolutionResult {
  DensityMatrixGrid rho;
  std::vector<StepRecord> records;
  long steps = 0;
  double dt = 0.0;  // step actually used (t_final / steps)
  double max_trace_drift = 0.0;
  double max_hermiticity = 0.0;
  double min_eigenvalue = 0.0;  // over all monitored records
};

/// Largest step accepted for this grid and parameters.
double max_stable_step(const DensityMatrixGrid& grid, const OscillatorParams& params, const EvolutionTerms& terms);

/// RK4 with symmetrised update. The step is shortened to t_final / ceil(t_final / dt).
/// Throws StepSizeError when dt exceeds max_stable_step and IntegrationAbort on
/// trace drift or non-finite values.
EvolutionResult evolve_bremsstrahlung(const DensityMatrixGrid& rho0, const OscillatorParams& params, double t_final,
                                      double dt, const EvolutionOptions& options = {});

/// exp(-alpha Omega^3 t (x' - x)^2 / 3). Omega = 0 is allowed.
double dephasing_decay(const dec::SuperpositionPair& pair, double t, const OscillatorParams& params);

struct TrajectoryEstimate {
  double R = 0.0;
  double T = 0.0;

  void validate() const;
};

/// Decoherence of two trajectories +-R sin(t / T): the dephasing factor with
/// Omega = 1/T, separation R and duration pi T.
double trajectory_estimate(const TrajectoryEstimate& est, const PhysicalConstants& pc = {});

/// Text checkpoint, see README for the layout.
void write_checkpoint(const DensityMatrixGrid& rho, double t, const std::string& path);
DensityMatrixGrid read_checkpoint(const std::string& path, double* t = nullptr);

/// Times where <x> crosses zero downward-or-upward, linearly interpolated.
std::vector<double> zero_crossings(const std::vector<StepRecord>& records);

}  // namespace casdec::meq
