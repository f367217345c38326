#include "ringcav/mc_oracle.hpp"

#include <boost/random/normal_distribution.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "ringcav/errors.hpp"
#include "ringcav/parallel.hpp"
#include "ringcav/spectra.hpp"

namespace ringcav {

namespace {

constexpr int kNoiseCols = 5;
constexpr int kNoiseIndex[kNoiseCols] = {Yc, Yd, Q, P, Lz};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// State plus the Wiener increments of the Q and P input noise, so the output
// sample sees the same input noise that drove the state.
constexpr int kAug = 10;
using MatAug = Eigen::Matrix<double, kAug, kAug>;
using VecAug = Eigen::Matrix<double, kAug, 1>;

struct Stepper {
  Mat8 Phi;
  MatAug Qd;
  MatAug L;  // lower-triangular factor of Qd
};

Stepper make_stepper(const DriftMatrix& F, const NoiseModel& noise, double dt) {
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (i != j && noise.D(i, j) != 0.0) {
        throw UsageError("mc_oracle: diffusion matrix must be diagonal");
      }
    }
    bool listed = false;
    for (int c : kNoiseIndex) listed = listed || c == i;
    if (!listed && noise.D(i, i) != 0.0) {
      throw UsageError("mc_oracle: unexpected noise on a coordinate without a bath");
    }
    if (noise.D(i, i) < 0.0) throw UsageError("mc_oracle: diffusion matrix must be >= 0");
  }
  Stepper s;
  s.Phi = (F.entries * dt).exp();

  // Exact discretization of the linear SDE (Van Loan): Qd = ∫ e^{As} GGᵀ e^{Aᵀs} ds.
  MatAug A = MatAug::Zero();
  A.topLeftCorner<8, 8>() = F.entries;
  Eigen::Matrix<double, kAug, kNoiseCols> G = Eigen::Matrix<double, kAug, kNoiseCols>::Zero();
  for (int c = 0; c < kNoiseCols; ++c) {
    const int idx = kNoiseIndex[c];
    G(idx, c) = std::sqrt(noise.D(idx, idx));
  }
  G(8, 2) = 1.0;  // W_Q
  G(9, 3) = 1.0;  // W_P
  Eigen::Matrix<double, 2 * kAug, 2 * kAug> M = Eigen::Matrix<double, 2 * kAug, 2 * kAug>::Zero();
  M.topLeftCorner<kAug, kAug>() = -A * dt;
  M.topRightCorner<kAug, kAug>() = G * G.transpose() * dt;
  M.bottomRightCorner<kAug, kAug>() = A.transpose() * dt;
  const Eigen::Matrix<double, 2 * kAug, 2 * kAug> E = M.exp();
  const MatAug phi_aug = E.bottomRightCorner<kAug, kAug>().transpose();
  MatAug Qd = phi_aug * E.topRightCorner<kAug, kAug>();
  Qd = 0.5 * (Qd + Qd.transpose()).eval();
  s.Qd = Qd;
  Eigen::LLT<MatAug> llt(Qd);
  if (llt.info() == Eigen::Success) {
    s.L = llt.matrixL();
  } else {
    // Rank-deficient (e.g. uncoupled modes with no bath): clamped symmetric
    // root S, then Sᵀ = QR gives Qd = RᵀR with Rᵀ lower triangular.
    Eigen::SelfAdjointEigenSolver<MatAug> es(Qd);
    const VecAug ev = es.eigenvalues().cwiseMax(0.0);
    const MatAug root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    Eigen::HouseholderQR<MatAug> qr(root);
    s.L = qr.matrixQR().triangularView<Eigen::Upper>().transpose();
  }
  return s;
}

}  // namespace

McStepMatrices step_matrices(const DriftMatrix& F, const NoiseModel& noise, double dt) {
  const Stepper s = make_stepper(F, noise, dt);
  return {s.Phi, s.Qd.topLeftCorner<8, 8>()};
}

namespace {

// Welch accumulator for one trajectory, direct DFT at a few frequencies.
class Welch {
 public:
  Welch(const SpectrumRequest& req, double dt) : req_(req), dt_(dt) {
    const int L = req.segment_steps;
    window_.resize(L);
    double sum2 = 0.0;
    for (int n = 0; n < L; ++n) {
      window_[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / L);
      sum2 += window_[n] * window_[n];
    }
    norm_ = 2.0 * dt / sum2;  // factor 2: shot noise = 1 ↔ two-sided PSD 1/2
    step_.resize(req.omega.size());
    for (std::size_t f = 0; f < req.omega.size(); ++f) {
      step_[f] = std::polar(1.0, req.omega[f] * dt);
    }
  }

  // y is the output sample of global post-burn-in step n. Completed segments
  // are reported through emit(start_step, estimates).
  // y holds one output sample per requested pair.
  template <class Emit>
  void push(long long n, const std::vector<double>& y, Emit&& emit) {
    const int L = req_.segment_steps;
    const int hop = L / 2;
    if (n % hop == 0) open_.push_back(Segment{n, std::vector<std::complex<double>>(req_.omega.size()),
                                              std::vector<std::complex<double>>(req_.omega.size(), 1.0)});
    for (auto& seg : open_) {
      const long long k = n - seg.start;
      const double wk = window_[static_cast<std::size_t>(k)];
      for (std::size_t f = 0; f < seg.acc.size(); ++f) {
        // Spelled out: std::complex products go through the slow NaN-aware path.
        const double pr = seg.phase[f].real(), pi = seg.phase[f].imag();
        const double sr = step_[f].real(), si = step_[f].imag();
        const double a = wk * y[f];
        seg.acc[f] += std::complex<double>(a * pr, a * pi);
        seg.phase[f] = std::complex<double>(pr * sr - pi * si, pr * si + pi * sr);
      }
    }
    if (!open_.empty() && n - open_.front().start == L - 1) {
      std::vector<double> est(req_.omega.size());
      for (std::size_t f = 0; f < est.size(); ++f) est[f] = norm_ * std::norm(open_.front().acc[f]);
      emit(open_.front().start, est);
      open_.erase(open_.begin());
    }
  }

 private:
  struct Segment {
    long long start;
    std::vector<std::complex<double>> acc;
    std::vector<std::complex<double>> phase;
  };
  const SpectrumRequest& req_;
  double dt_;
  std::vector<double> window_;
  double norm_ = 0.0;
  std::vector<std::complex<double>> step_;
  std::vector<Segment> open_;
};

struct TrajectoryResult {
  std::vector<Mat8> batch_cov;                  // mean u uᵀ per batch
  std::vector<std::vector<double>> batch_spec;  // mean S per batch and frequency
  std::vector<long long> batch_segments;
  long long samples = 0;
  long long segments = 0;
};

TrajectoryResult run_trajectory(const Stepper& st, const McConfig& cfg, double gamma_0,
                                const SpectrumRequest* req, std::uint64_t traj) {
  std::mt19937_64 rng(trajectory_seed(cfg.seed, traj));
  boost::random::normal_distribution<double> normal(0.0, 1.0);  // ziggurat

  const long long total = static_cast<long long>(std::llround(cfg.t_total / cfg.dt));
  const long long burn = static_cast<long long>(std::floor(cfg.burn_in * total));
  const long long kept = total - burn;
  const int nb = cfg.batches_per_traj;

  TrajectoryResult out;
  out.batch_cov.assign(nb, Mat8::Zero());
  std::vector<long long> batch_count(nb, 0);
  const std::size_t nf = req ? req->omega.size() : 0;
  out.batch_spec.assign(nb, std::vector<double>(nf, 0.0));
  out.batch_segments.assign(nb, 0);

  std::optional<Welch> welch;
  if (req) welch.emplace(*req, cfg.dt);
  std::vector<double> cs(nf), sn(nf), y(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    cs[f] = std::cos(req->theta[f]);
    sn[f] = std::sin(req->theta[f]);
  }
  const double sg = std::sqrt(gamma_0);
  const double in_scale = std::sqrt(0.5) / cfg.dt;

  Vec8 u = Vec8::Zero();
  VecAug xi;
  for (long long n = 0; n < total; ++n) {
    for (int k = 0; k < kAug; ++k) xi(k) = normal(rng);
    const VecAug eta = st.L.triangularView<Eigen::Lower>() * xi;
    const Vec8 next = st.Phi * u + eta.head<8>();
    if (n >= burn) {
      const long long m = n - burn;
      const int b = static_cast<int>(std::min<long long>(nb - 1, m * nb / kept));
      out.batch_cov[b].selfadjointView<Eigen::Lower>().rankUpdate(next);
      ++batch_count[b];
      if (welch) {
        // Q_out = √γ δQ - Q_in, Q_in averaged over the step: ΔW/(√2 dt)
        const double qbar = 0.5 * (u(Q) + next(Q));
        const double pbar = 0.5 * (u(P) + next(P));
        for (std::size_t f = 0; f < nf; ++f) {
          y[f] = sg * (cs[f] * qbar + sn[f] * pbar) - in_scale * (cs[f] * eta(8) + sn[f] * eta(9));
        }
        welch->push(m, y, [&](long long start, const std::vector<double>& est) {
          const int sb = static_cast<int>(std::min<long long>(nb - 1, start * nb / kept));
          for (std::size_t f = 0; f < nf; ++f) out.batch_spec[sb][f] += est[f];
          ++out.batch_segments[sb];
          ++out.segments;
        });
      }
    }
    u = next;
  }
  for (int b = 0; b < nb; ++b) {
    Mat8& c = out.batch_cov[b];
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
    if (batch_count[b] > 0) c /= static_cast<double>(batch_count[b]);
    if (out.batch_segments[b] > 0) {
      for (auto& v : out.batch_spec[b]) v /= static_cast<double>(out.batch_segments[b]);
    }
  }
  out.samples = kept;
  return out;
}

}  // namespace

double max_abs_eigenvalue(const DriftMatrix& F) {
  Eigen::EigenSolver<Mat8> es(F.entries, false);
  if (es.info() != Eigen::Success) throw NumericalError("mc_oracle: eigen solver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_config(const McConfig& cfg, const DriftMatrix& F) {
  std::ostringstream os;
  const double lam = max_abs_eigenvalue(F);
  if (!(cfg.dt > 0.0)) os << "dt must be > 0; ";
  else if (!(cfg.dt < 0.1 / lam)) os << "dt = " << cfg.dt << " s violates dt < 0.1/|lambda|max = " << 0.1 / lam << " s; ";
  if (cfg.n_traj < 1) os << "n_traj must be >= 1; ";
  if (!(cfg.burn_in >= 0.0 && cfg.burn_in < 1.0)) os << "burn_in must be in [0, 1); ";
  if (cfg.batches_per_traj < 1) os << "batches_per_traj must be >= 1; ";
  if (!(cfg.t_total > 0.0)) os << "t_total must be > 0; ";
  else if (cfg.dt > 0.0 && (1.0 - cfg.burn_in) * cfg.t_total / cfg.dt < cfg.batches_per_traj) {
    os << "t_total too short for the requested batches; ";
  }
  if (!os.str().empty()) throw ConfigError("mc config: " + os.str());
}

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t trajectory) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trajectory + 0x632be59bd9b4e019ULL));
}

McRun run_oracle(const DriftMatrix& F, const NoiseModel& noise, const McConfig& cfg,
                 const SpectrumRequest* spectrum) {
  check_config(cfg, F);
  if (spectrum) {
    const long long kept = static_cast<long long>(
        std::llround(cfg.t_total / cfg.dt) - std::floor(cfg.burn_in * std::llround(cfg.t_total / cfg.dt)));
    if (spectrum->theta.size() != spectrum->omega.size()) {
      throw UsageError("spectrum request: omega and theta must have the same length");
    }
    if (spectrum->segment_steps < 4 || spectrum->segment_steps % 2 != 0 ||
        spectrum->segment_steps > kept) {
      throw ConfigError("mc config: segment_steps must be even, >= 4 and fit in the kept samples");
    }
  }
  const Stepper st = make_stepper(F, noise, cfg.dt);

  std::vector<TrajectoryResult> trajs(static_cast<std::size_t>(cfg.n_traj));
  parallel_for(trajs.size(), cfg.threads, [&](std::size_t t) {
    trajs[t] = run_trajectory(st, cfg, F.gamma_0, spectrum, t);
  });

  McRun run;
  // Reduction in trajectory order keeps the result independent of thread count.
  std::vector<Mat8> means;
  long long samples = 0;
  for (const auto& tr : trajs) {
    for (const auto& m : tr.batch_cov) means.push_back(m);
    samples += tr.samples;
  }
  const int nb = static_cast<int>(means.size());
  Mat8 mean = Mat8::Zero();
  for (const auto& m : means) mean += m;
  mean /= nb;
  Mat8 var = Mat8::Zero();
  for (const auto& m : means) var += (m - mean).cwiseAbs2();
  McCovariance& cov = run.covariance;
  cov.V_est = 0.5 * (mean + mean.transpose());
  cov.stderr_ = nb > 1 ? (var / (nb - 1.0) / nb).cwiseSqrt().eval() : Mat8::Zero().eval();
  cov.n_batches = nb;
  cov.samples = samples;

  if (spectrum) {
    McSpectrum sp;
    sp.theta = spectrum->theta;
    sp.omega = spectrum->omega;
    sp.segment_steps = spectrum->segment_steps;
    const std::size_t nf = sp.omega.size();
    std::vector<std::vector<double>> batches;
    for (const auto& tr : trajs) {
      sp.segments += tr.segments;
      for (std::size_t b = 0; b < tr.batch_spec.size(); ++b) {
        if (tr.batch_segments[b] > 0) batches.push_back(tr.batch_spec[b]);
      }
    }
    if (batches.empty()) throw ConfigError("mc config: no complete Welch segment");
    sp.S_est.assign(nf, 0.0);
    sp.stderr_.assign(nf, 0.0);
    const double n = static_cast<double>(batches.size());
    for (std::size_t f = 0; f < nf; ++f) {
      double m = 0.0;
      for (const auto& b : batches) m += b[f];
      m /= n;
      double v = 0.0;
      for (const auto& b : batches) v += (b[f] - m) * (b[f] - m);
      sp.S_est[f] = m;
      sp.stderr_[f] = n > 1 ? std::sqrt(v / (n - 1.0) / n) : 0.0;
    }
    run.spectrum = std::move(sp);
  }
  return run;
}

McCovariance simulate(const DriftMatrix& F, const NoiseModel& noise, const McConfig& cfg) {
  return run_oracle(F, noise, cfg).covariance;
}

McSpectrum output_spectrum_estimate(const DriftMatrix& F, const NoiseModel& noise,
                                    const McConfig& cfg, double theta,
                                    std::span<const double> omega_grid, int segment_steps) {
  SpectrumRequest req{{omega_grid.begin(), omega_grid.end()},
                      std::vector<double>(omega_grid.size(), theta), segment_steps};
  return *run_oracle(F, noise, cfg, &req).spectrum;
}

double expected_periodogram(const DerivedParams& d, const DriftMatrix& F, double theta,
                            double omega, int segment_steps, double dt) {
  const int L = segment_steps;
  // Hann transform as a combination of three Dirichlet sums.
  auto dirichlet = [L](double x) -> std::complex<double> {
    const std::complex<double> z = std::polar(1.0, -x);
    if (std::abs(1.0 - z) < 1e-12) return static_cast<double>(L);
    return (1.0 - std::pow(z, L)) / (1.0 - z);
  };
  const double sum_w2 = 3.0 * L / 8.0;
  const double shift = 2.0 * M_PI / L;
  auto kernel = [&](double nu) {
    const double x = nu * dt;
    const std::complex<double> w =
        0.5 * dirichlet(x) - 0.25 * dirichlet(x - shift) - 0.25 * dirichlet(x + shift);
    return dt * std::norm(w) / sum_w2;
  };
  const double bin = 2.0 * M_PI / (L * dt);
  const int half_bins = 40, per_bin = 16;
  const double h = bin / per_bin;
  double acc = 0.0, weight = 0.0;
  for (int i = -half_bins * per_bin; i <= half_bins * per_bin; ++i) {
    const double nu = i * h;
    const double wq = (i == -half_bins * per_bin || i == half_bins * per_bin) ? 0.5 : 1.0;
    const double k = kernel(nu) * wq;
    const double S = homodyne_spectrum(d, F, transfer(F, omega - nu), theta,
                                       NoiseRegime::markovian).S;
    acc += k * S;
    weight += k;
  }
  // The truncated kernel tail carries a constant (shot-noise) level.
  return acc / weight;
}

DivergenceReport divergence_check(const DriftMatrix& F, const NoiseModel& noise,
                                  const McConfig& cfg, int windows) {
  check_config(cfg, F);
  const Stepper st = make_stepper(F, noise, cfg.dt);
  std::mt19937_64 rng(trajectory_seed(cfg.seed, 0));
  boost::random::normal_distribution<double> normal(0.0, 1.0);  // ziggurat
  const long long total = static_cast<long long>(std::llround(cfg.t_total / cfg.dt));
  const long long burn = static_cast<long long>(std::floor(cfg.burn_in * total));
  const long long per = std::max<long long>(1, (total - burn) / windows);

  DivergenceReport rep;
  Vec8 u = Vec8::Zero();
  VecAug xi;
  double acc = 0.0;
  long long count = 0;
  for (long long n = 0; n < total; ++n) {
    for (int k = 0; k < kAug; ++k) xi(k) = normal(rng);
    u = st.Phi * u + (st.L.triangularView<Eigen::Lower>() * xi).head<8>();
    if (n < burn) continue;
    acc += u.squaredNorm();
    if (++count == per) {
      rep.window_second_moment.push_back(acc / per);
      acc = 0.0;
      count = 0;
      if (static_cast<int>(rep.window_second_moment.size()) == windows) break;
    }
  }
  const auto& w = rep.window_second_moment;
  rep.diverging = w.size() >= 2;
  for (std::size_t i = 1; i < w.size(); ++i) rep.diverging = rep.diverging && w[i] > w[i - 1];
  if (!w.empty()) rep.diverging = rep.diverging && std::isfinite(w.back()) && w.back() > 10.0 * w.front();
  return rep;
}

}  // namespace ringcav
