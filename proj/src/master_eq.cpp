#include "casdec/master_eq.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "casdec/errors.hpp"

namespace casdec::meq {
namespace {

constexpr int kPad = 4;
constexpr int kTile = 32;
// 8th-order central second derivative, k = 1..4 (the k = 0 weight cancels in d_x^2 - d_y^2)
constexpr double kD2[kPad + 1] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
// 4th-order central first derivative, k = 1..2
constexpr double kD1[3] = {0.0, 2.0 / 3.0, -1.0 / 12.0};
// largest |symbol| of the stencils above on the grid (times 1/dx^2 and 1/dx)
constexpr double kD2Symbol = 6.5;
constexpr double kD1Symbol = 1.3722;
constexpr double kRk4Margin = 2.5;  // RK4 stability reaches about 2.8 on both axes
constexpr char kCheckpointMagic[] = "casdec-density-matrix v1";

double dephasing_exponent(double dx, double t, double omega, double alpha) {
  return alpha * omega * omega * omega * t * dx * dx / 3.0;
}

void require_grid(int n, double a) {
  if (n < 2 * kPad + 2) throw InputError("density-matrix grid needs at least " + std::to_string(2 * kPad + 2) + " points");
  if (!(a > 0.0 && a <= CavityConfig::half_width())) {
    throw GeometryError("grid half-width must lie in (0, L/2], got " + std::to_string(a));
  }
}

// Generator of the master equation acting on zero-padded planar (real,
// imaginary) buffers of stride n + 2 kPad. Only the upper triangle j >= i of
// the output is written; Hermiticity supplies the rest.
class Generator {
 public:
  Generator(const DensityMatrixGrid& grid, const OscillatorParams& p, const EvolutionTerms& terms)
      : n_(grid.n_points()),
        stride_(n_ + 2 * kPad),
        diag_re_(static_cast<std::size_t>(n_) * n_),
        diag_im_(diag_re_.size()),
        fr_(diag_re_.size()) {
    const double dx = grid.dx();
    const double w = p.omega_eff;
    kin_ = terms.unitary ? 1.0 / (2.0 * p.mass * dx * dx) : 0.0;
    friction_ = terms.friction && p.alpha > 0.0;
    const double a = grid.half_width();
    const double layer = terms.absorb_fraction * 2.0 * a;
    const auto g = [&](double x) {
      const double depth = std::abs(x) - (a - layer);
      if (!terms.absorbing || layer <= 0.0 || depth <= 0.0) return 0.0;
      const double s = depth / layer;
      return s * s;
    };
    const double kappa = terms.absorb_rate * w;
    for (int i = 0; i < n_; ++i) {
      const double x = grid.x(i);
      for (int j = 0; j < n_; ++j) {
        const double y = grid.x(j);
        const double sep = x - y;
        double re = 0.0, im = 0.0;
        if (terms.unitary) im -= 0.5 * p.mass * w * w * (x * x - y * y);
        if (terms.dephasing) re -= p.alpha * w * w * w / 3.0 * sep * sep;
        if (terms.absorbing) {
          const double dg = g(x) - g(y);
          re -= kappa * dg * dg;
        }
        const std::size_t q = static_cast<std::size_t>(i) * n_ + j;
        diag_re_[q] = re;
        diag_im_[q] = im;
        fr_[q] = friction_ ? -p.alpha * w * w / (3.0 * p.mass) * sep / dx : 0.0;
      }
    }
  }

  std::size_t stride() const { return static_cast<std::size_t>(stride_); }
  std::size_t padded_index(int i, int j) const {
    return static_cast<std::size_t>(i + kPad) * stride_ + static_cast<std::size_t>(j + kPad);
  }

#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
  __attribute__((target_clones("avx2", "default")))
#endif
  void apply(const double* __restrict re, const double* __restrict im, double* __restrict out_re,
             double* __restrict out_im) const {
    const std::ptrdiff_t S = stride_;
    const double kin = kin_;
    for (int i = 0; i < n_; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * n_;
      const double* R = re + padded_index(i, 0);
      const double* I = im + padded_index(i, 0);
      const double* dre = diag_re_.data() + row;
      const double* dim = diag_im_.data() + row;
      double* ore = out_re + row;
      double* oim = out_im + row;
      if (!friction_) {
        for (int j = i; j < n_; ++j) {
          double sr = 0.0, si = 0.0;
          for (int k = 1; k <= kPad; ++k) {
            sr += kD2[k] * (R[j + k * S] + R[j - k * S] - R[j + k] - R[j - k]);
            si += kD2[k] * (I[j + k * S] + I[j - k * S] - I[j + k] - I[j - k]);
          }
          ore[j] = -kin * si + dre[j] * R[j] - dim[j] * I[j];
          oim[j] = kin * sr + dre[j] * I[j] + dim[j] * R[j];
        }
        continue;
      }
      const double* f = fr_.data() + row;
      for (int j = i; j < n_; ++j) {
        double sr = 0.0, si = 0.0, dr = 0.0, di = 0.0;
        for (int k = 1; k <= 2; ++k) {
          const double ar = R[j + k * S], br = R[j - k * S], cr = R[j + k], er = R[j - k];
          const double ai = I[j + k * S], bi = I[j - k * S], ci = I[j + k], ei = I[j - k];
          sr += kD2[k] * (ar + br - cr - er);
          si += kD2[k] * (ai + bi - ci - ei);
          dr += kD1[k] * (ar - br - cr + er);
          di += kD1[k] * (ai - bi - ci + ei);
        }
        for (int k = 3; k <= kPad; ++k) {
          sr += kD2[k] * (R[j + k * S] + R[j - k * S] - R[j + k] - R[j - k]);
          si += kD2[k] * (I[j + k * S] + I[j - k * S] - I[j + k] - I[j - k]);
        }
        ore[j] = -kin * si + dre[j] * R[j] - dim[j] * I[j] + f[j] * dr;
        oim[j] = kin * sr + dre[j] * I[j] + dim[j] * R[j] + f[j] * di;
      }
    }
  }

 private:
  int n_;
  int stride_;
  double kin_ = 0.0;
  bool friction_ = false;
  std::vector<double> diag_re_;
  std::vector<double> diag_im_;
  std::vector<double> fr_;
};

}  // namespace

DensityMatrixGrid::DensityMatrixGrid(int n_points, double half_width)
    : n_(n_points), a_(half_width), dx_(0.0) {
  require_grid(n_points, half_width);
  dx_ = 2.0 * a_ / (n_ - 1);
  values_.assign(static_cast<std::size_t>(n_) * n_, cplx{});
}

DensityMatrixGrid DensityMatrixGrid::gaussian(int n_points, double half_width, double x0, double sigma, double p0) {
  if (!(sigma > 0.0)) throw InputError("Gaussian width must be positive");
  DensityMatrixGrid g(n_points, half_width);
  std::vector<cplx> psi(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double u = (g.x(i) - x0) / sigma;
    psi[i] = std::exp(-0.25 * u * u) * std::exp(cplx(0.0, p0 * g.x(i)));
  }
  for (int i = 0; i < n_points; ++i)
    for (int j = 0; j < n_points; ++j) g(i, j) = psi[i] * std::conj(psi[j]);
  g.normalize();
  return g;
}

DensityMatrixGrid DensityMatrixGrid::two_gaussian(int n_points, double half_width, double d, double sigma) {
  if (!(sigma > 0.0)) throw InputError("Gaussian width must be positive");
  DensityMatrixGrid g(n_points, half_width);
  std::vector<double> psi(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double u1 = (g.x(i) - d) / sigma;
    const double u2 = (g.x(i) + d) / sigma;
    psi[i] = std::exp(-0.25 * u1 * u1) + std::exp(-0.25 * u2 * u2);
  }
  for (int i = 0; i < n_points; ++i)
    for (int j = 0; j < n_points; ++j) g(i, j) = psi[i] * psi[j];
  g.normalize();
  return g;
}

double DensityMatrixGrid::trace() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i).real();
  return s * dx_;
}

double DensityMatrixGrid::mean_x() const {
  double s = 0.0, norm = 0.0;
  for (int i = 0; i < n_; ++i) {
    s += x(i) * (*this)(i, i).real();
    norm += (*this)(i, i).real();
  }
  return s / norm;
}

double DensityMatrixGrid::hermiticity_error() const {
  double e2 = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) e2 = std::max(e2, std::norm((*this)(i, j) - std::conj((*this)(j, i))));
  return std::sqrt(e2);
}

double DensityMatrixGrid::min_diagonal() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i) m = std::min(m, (*this)(i, i).real());
  return m;
}

double DensityMatrixGrid::min_eigenvalue() const {
  Eigen::MatrixXcd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j) * dx_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  return solver.eigenvalues().minCoeff();
}

void DensityMatrixGrid::normalize() {
  const double tr = trace();
  if (!(tr > 0.0)) throw InputError("density matrix has non-positive trace");
  for (auto& v : values_) v /= tr;
}

void DensityMatrixGrid::validate() const {
  require_grid(n_, a_);
  if (values_.size() != static_cast<std::size_t>(n_) * n_) throw InputError("density-matrix storage size mismatch");
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("density matrix has non-finite entries");
  }
  if (hermiticity_error() > 1e-12) throw InputError("density matrix is not Hermitian (error " + std::to_string(hermiticity_error()) + ")");
  if (std::abs(trace() - 1.0) > 1e-9) throw InputError("density matrix trace " + std::to_string(trace()) + " != 1");
  if (min_diagonal() < -1e-10) throw InputError("density matrix has negative populations");
}

void OscillatorParams::validate() const {
  if (!(omega_eff > 0.0) || !std::isfinite(omega_eff)) throw ConfigError("Omega_eff must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
}

double max_stable_step(const DensityMatrixGrid& grid, const OscillatorParams& p, const EvolutionTerms& terms) {
  p.validate();
  const double dx = grid.dx();
  const double a = grid.half_width();
  const double w = p.omega_eff;
  double rate = 0.0;
  double dt_max = std::numeric_limits<double>::infinity();
  if (terms.unitary) {
    rate += kD2Symbol / (2.0 * p.mass * dx * dx) + 0.5 * p.mass * w * w * a * a;
    dt_max = 0.5 * p.mass * dx * dx;
  }
  if (terms.friction) rate += p.alpha * w * w / (3.0 * p.mass) * 2.0 * a * 2.0 * kD1Symbol / dx;
  if (terms.dephasing) rate += p.alpha * w * w * w / 3.0 * 4.0 * a * a;
  if (terms.absorbing) rate += terms.absorb_rate * w;
  if (rate > 0.0) dt_max = std::min(dt_max, kRk4Margin / rate);
  return dt_max;
}

EvolutionResult evolve_bremsstrahlung(const DensityMatrixGrid& rho0, const OscillatorParams& params, double t_final,
                                      double dt, const EvolutionOptions& options) {
  rho0.validate();
  params.validate();
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InputError("t_final must be finite and >= 0");
  if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
  const double dt_max = max_stable_step(rho0, params, options.terms);
  if (dt > dt_max) {
    throw StepSizeError("dt = " + std::to_string(dt) + " exceeds the stable step " + std::to_string(dt_max) +
                        " for this grid (dx = " + std::to_string(rho0.dx()) + ", m = " + std::to_string(params.mass) +
                        ")");
  }

  const int n = rho0.n_points();
  const Generator gen(rho0, params, options.terms);
  const std::size_t S = gen.stride();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const long steps = t_final == 0.0 ? 0 : static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);

  std::vector<double> yr(nn), yi(nn), kr(nn), ki(nn), ar(nn), ai(nn);
  std::vector<double> sr(S * S, 0.0), si(S * S, 0.0);
  for (std::size_t q = 0; q < nn; ++q) {
    yr[q] = rho0.values()[q].real();
    yi[q] = rho0.values()[q].imag();
  }

  // padded stage = y + c k on the upper triangle, mirrored below the diagonal
  const auto load_stage = [&](double c) {
    for (int i = 0; i < n; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * n;
      double* __restrict dr = sr.data() + gen.padded_index(i, 0);
      double* __restrict di = si.data() + gen.padded_index(i, 0);
      for (int j = i; j < n; ++j) {
        dr[j] = yr[row + j] + c * kr[row + j];
        di[j] = yi[row + j] + c * ki[row + j];
      }
      di[i] = 0.0;
    }
    // tiled so the transposed writes stay in cache
    for (int bi = 0; bi < n; bi += kTile) {
      for (int bj = bi; bj < n; bj += kTile) {
        const int i_end = std::min(n, bi + kTile);
        const int j_end = std::min(n, bj + kTile);
        for (int i = bi; i < i_end; ++i) {
          for (int j = std::max(i + 1, bj); j < j_end; ++j) {
            const std::size_t u = gen.padded_index(i, j);
            const std::size_t l = gen.padded_index(j, i);
            sr[l] = sr[u];
            si[l] = -si[u];
          }
        }
      }
    }
  };
  const auto to_grid = [&](DensityMatrixGrid& g) {
    for (std::size_t q = 0; q < nn; ++q) g.values()[q] = {yr[q], yi[q]};
  };

  DensityMatrixGrid rho = rho0;
  EvolutionResult result;
  const double tr0 = rho0.trace();
  const auto record = [&](long step) {
    StepRecord r;
    r.t = static_cast<double>(step) * h;
    r.trace = rho.trace();
    r.mean_x = rho.mean_x();
    r.hermiticity = rho.hermiticity_error();
    if (options.eigen_every > 0 && step % options.eigen_every == 0) {
      r.has_eigenvalue = true;
      r.min_eigenvalue = rho.min_eigenvalue();
      result.min_eigenvalue = step == 0 ? r.min_eigenvalue : std::min(result.min_eigenvalue, r.min_eigenvalue);
    }
    result.max_hermiticity = std::max(result.max_hermiticity, r.hermiticity);
    result.records.push_back(r);
  };
  record(0);

  std::fill(kr.begin(), kr.end(), 0.0);
  std::fill(ki.begin(), ki.end(), 0.0);
  for (long step = 1; step <= steps; ++step) {
    load_stage(0.0);
    gen.apply(sr.data(), si.data(), kr.data(), ki.data());
    ar = kr;
    ai = ki;
    for (const double c : {0.5 * h, 0.5 * h, h}) {
      load_stage(c);
      gen.apply(sr.data(), si.data(), kr.data(), ki.data());
      const double wgt = c == h ? 1.0 : 2.0;
      for (std::size_t q = 0; q < nn; ++q) {
        ar[q] += wgt * kr[q];
        ai[q] += wgt * ki[q];
      }
    }
    // symmetrised update: the upper triangle is advanced and mirrored
    const double w = h / 6.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * n;
      for (int j = i; j < n; ++j) {
        yr[row + j] += w * ar[row + j];
        yi[row + j] += w * ai[row + j];
      }
      yi[row + i] = 0.0;
    }
    for (int bi = 0; bi < n; bi += kTile) {
      for (int bj = bi; bj < n; bj += kTile) {
        const int i_end = std::min(n, bi + kTile);
        const int j_end = std::min(n, bj + kTile);
        for (int i = bi; i < i_end; ++i) {
          const std::size_t row = static_cast<std::size_t>(i) * n;
          for (int j = std::max(i + 1, bj); j < j_end; ++j) {
            const std::size_t l = static_cast<std::size_t>(j) * n + i;
            yr[l] = yr[row + j];
            yi[l] = -yi[row + j];
          }
        }
      }
    }
    std::fill(kr.begin(), kr.end(), 0.0);
    std::fill(ki.begin(), ki.end(), 0.0);

    double tr = 0.0;
    bool finite = true;
    for (int i = 0; i < n; ++i) {
      const double d = yr[static_cast<std::size_t>(i) * n + i];
      finite = finite && std::isfinite(d);
      tr += d;
    }
    tr *= rho0.dx();
    const double drift = std::abs(tr - tr0);
    result.max_trace_drift = std::max(result.max_trace_drift, drift);
    if (!finite || drift > options.abort_trace_drift) {
      std::ostringstream msg;
      msg << "integration aborted at step " << step << " (t = " << static_cast<double>(step) * h
          << "): trace drift " << drift << (finite ? "" : ", non-finite populations");
      throw IntegrationAbort(msg.str());
    }
    const bool want = step == steps || (options.record_every > 0 && step % options.record_every == 0) ||
                      (options.eigen_every > 0 && step % options.eigen_every == 0);
    if (want) {
      to_grid(rho);
      record(step);
    }
  }
  to_grid(rho);
  result.rho = std::move(rho);
  result.steps = steps;
  result.dt = h;
  return result;
}

double dephasing_decay(const dec::SuperpositionPair& pair, double t, const OscillatorParams& params) {
  pair.validate();
  if (!(t >= 0.0)) throw InputError("time must be >= 0");
  if (!(params.omega_eff >= 0.0) || !(params.alpha >= 0.0)) throw ConfigError("Omega and alpha must be >= 0");
  return std::exp(-dephasing_exponent(pair.separation(), t, params.omega_eff, params.alpha));
}

void TrajectoryEstimate::validate() const {
  if (!(R > 0.0) || !(T > 0.0)) throw InputError("trajectory estimate needs R > 0 and T > 0");
  if (!(R < T)) throw InputError("trajectory speed R/T must stay below c");
}

double trajectory_estimate(const TrajectoryEstimate& est, const PhysicalConstants& pc) {
  est.validate();
  pc.validate();
  const double omega = 1.0 / est.T;
  return std::exp(-dephasing_exponent(est.R, std::numbers::pi * est.T, omega, pc.alpha));
}

void write_checkpoint(const DensityMatrixGrid& rho, double t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open checkpoint file " + path);
  out << kCheckpointMagic << '\n';
  out << std::setprecision(17);
  out << "n_points " << rho.n_points() << '\n';
  out << "half_width " << rho.half_width() << '\n';
  out << "time " << t << '\n';
  for (const auto& v : rho.values()) out << v.real() << ' ' << v.imag() << '\n';
  if (!out) throw InputError("failed writing checkpoint " + path);
}

DensityMatrixGrid read_checkpoint(const std::string& path, double* t) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint file " + path);
  std::string line;
  std::getline(in, line);
  if (line != kCheckpointMagic) throw InputError(path + ": not a density-matrix checkpoint");
  std::string key;
  int n = 0;
  double a = 0.0, time = 0.0;
  in >> key >> n;
  if (key != "n_points") throw InputError(path + ": expected n_points");
  in >> key >> a;
  if (key != "half_width") throw InputError(path + ": expected half_width");
  in >> key >> time;
  if (key != "time") throw InputError(path + ": expected time");
  DensityMatrixGrid g(n, a);
  for (auto& v : g.values()) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw InputError(path + ": truncated checkpoint");
    v = {re, im};
  }
  if (t) *t = time;
  return g;
}

std::vector<double> zero_crossings(const std::vector<StepRecord>& records) {
  std::vector<double> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double a = records[i - 1].mean_x;
    const double b = records[i].mean_x;
    if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
      const double w = a / (a - b);
      out.push_back(records[i - 1].t + w * (records[i].t - records[i - 1].t));
    }
  }
  return out;
}

}  // namespace casdec::meq
