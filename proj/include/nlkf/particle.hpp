#ifndef NLKF_PARTICLE_HPP
#define NLKF_PARTICLE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nlkf/filters.hpp"
#include "nlkf/rng.hpp"

namespace nlkf {

enum class ProposalKind { Prior, Ekf, Ukf, NewKf };

inline const char* proposal_name(ProposalKind k) {
  switch (k) {
    case ProposalKind::Prior: return "PF";
    case ProposalKind::Ekf: return "PF-EKF";
    case ProposalKind::Ukf: return "PF-UKF";
    case ProposalKind::NewKf: return "PF-NewKF";
  }
  return "?";
}

// Hooks the particle filter needs beyond the Gaussian-filter model: exact
// transition sampling and the log densities of transition and likelihood.
struct ParticleModel {
  int n = 1;
  std::function<VectorXd(const VectorXd&, int, Rng&)> sample_transition;
  std::function<double(const VectorXd&, const VectorXd&, int)> transition_log_pdf;
  std::function<double(const VectorXd&, const VectorXd&, int)> likelihood_log_pdf;
  SystemModel kf_model;  // drives the Kalman-type proposals
};

struct ParticleEnsemble {
  std::vector<VectorXd> particles;
  VectorXd weights;
  std::vector<MatrixXd> per_particle_cov;  // only for KF proposals
  int step = 0;
  long fallback_count = 0;  // particles that fell back to the prior proposal
  VectorXd mean_estimate;   // weighted mean before any resampling

  int size() const { return static_cast<int>(particles.size()); }

  VectorXd posterior_mean() const {
    VectorXd mean = VectorXd::Zero(particles.front().size());
    for (int i = 0; i < size(); ++i) mean += weights(i) * particles[i];
    return mean;
  }
};

inline double effective_sample_size(const VectorXd& weights) {
  return 1.0 / weights.squaredNorm();
}

// Systematic resampling with a single offset u0; deterministic given
// (weights, u0). `count` is the number of draws (defaults to the weight
// count). Positions fall in right-open cumulative bins.
inline std::vector<int> systematic_resample(const VectorXd& weights, double u0,
                                            int count = -1) {
  const int n = static_cast<int>(weights.size());
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw DomainError("systematic_resample: weights not normalized");
  if (count < 0) count = n;
  std::vector<int> indices(count);
  double cum = weights(0);
  int j = 0;
  for (int i = 0; i < count; ++i) {
    const double pos = (i + u0) / count;
    while (pos >= cum && j + 1 < n) cum += weights(++j);
    indices[i] = j;
  }
  return indices;
}

inline double gaussian_log_pdf(const VectorXd& x, const GaussianBelief& b) {
  Eigen::LLT<MatrixXd> llt(b.cov);
  if (llt.info() != Eigen::Success)
    throw NotPsdError("gaussian_log_pdf: covariance not positive definite", 0);
  const VectorXd d = x - b.mean;
  const VectorXd w = llt.matrixL().solve(d);
  double log_det = 0.0;
  for (int i = 0; i < b.dim(); ++i) log_det += std::log(llt.matrixL()(i, i));
  return -0.5 * w.squaredNorm() - log_det -
         0.5 * b.dim() * std::log(2.0 * M_PI);
}

// One Kalman-filter step seeded at a single particle; the posterior Gaussian
// is the proposal distribution.
inline GaussianBelief kf_proposal(const VectorXd& particle, const MatrixXd& cov,
                                  const SystemModel& model, const VectorXd& y,
                                  ProposalKind kind, const UtParams& params,
                                  int step) {
  FilterState state{GaussianBelief(particle, cov), step};
  FilterState next;
  const VectorXd u(0);
  switch (kind) {
    case ProposalKind::Ekf: next = ekf_step(state, model, u, y); break;
    case ProposalKind::Ukf: next = ukf_step(state, model, u, y, params); break;
    case ProposalKind::NewKf: next = newkf_step(state, model, u, y, params); break;
    default: throw DomainError("kf_proposal: prior kind has no Gaussian proposal");
  }
  return next.belief;
}

struct PfOptions {
  UtParams ut_params;
  double resample_threshold = 0.5;  // resample when ESS < threshold * N
};

// Sequential importance resampling with log-domain weights. Each particle
// draws from its own seed-derived stream so the step is deterministic
// regardless of evaluation order.
inline ParticleEnsemble pf_step(const ParticleEnsemble& ensemble,
                                const ParticleModel& model, const VectorXd& y,
                                ProposalKind proposal, std::uint64_t master_seed,
                                const PfOptions& opt = {}) {
  const int n = ensemble.size();
  const int t = ensemble.step;
  ParticleEnsemble next;
  next.particles.resize(n);
  next.step = t + 1;
  next.fallback_count = ensemble.fallback_count;
  const bool kf_kind = proposal != ProposalKind::Prior;
  if (kf_kind) next.per_particle_cov.resize(n);

  VectorXd log_w(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(t) * 1000003u + i));
    const VectorXd& prev = ensemble.particles[i];
    double log_inc;
    VectorXd drawn;
    bool used_prior = !kf_kind;
    if (kf_kind) {
      try {
        const GaussianBelief prop = kf_proposal(
            prev, ensemble.per_particle_cov[i], model.kf_model, y, proposal,
            opt.ut_params, t);
        const MatrixXd root = matrix_sqrt(prop.cov);
        VectorXd z(model.n);
        for (int d = 0; d < model.n; ++d) z(d) = normal_sample(rng);
        drawn = prop.mean + root * z;
        log_inc = model.likelihood_log_pdf(y, drawn, t + 1) +
                  model.transition_log_pdf(drawn, prev, t) -
                  gaussian_log_pdf(drawn, prop);
        next.per_particle_cov[i] = prop.cov;
        // A draw outside the transition support carries zero weight; redraw
        // that particle from the prior proposal instead of discarding it.
        if (!std::isfinite(log_inc)) {
          used_prior = true;
          ++next.fallback_count;
        }
      } catch (const FilterError&) {
        used_prior = true;
        ++next.fallback_count;
        next.per_particle_cov[i] = ensemble.per_particle_cov[i];
      }
    }
    if (used_prior) {
      drawn = model.sample_transition(prev, t, rng);
      // Transition prior proposal: prior / proposal cancels.
      log_inc = model.likelihood_log_pdf(y, drawn, t + 1);
    }
    next.particles[i] = drawn;
    log_w(i) = std::log(ensemble.weights(i)) + log_inc;
  }

  const double max_lw = log_w.maxCoeff();
  if (!std::isfinite(max_lw))
    throw FilterError("pf_step: likelihood underflow, all particle weights zero");
  VectorXd w = (log_w.array() - max_lw).exp();
  next.weights = w / w.sum();
  next.mean_estimate = next.posterior_mean();

  if (effective_sample_size(next.weights) < opt.resample_threshold * n) {
    Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(t) * 1000003u + n));
    const auto idx = systematic_resample(next.weights, uniform_sample(rng));
    std::vector<VectorXd> resampled(n);
    std::vector<MatrixXd> resampled_cov(kf_kind ? n : 0);
    for (int i = 0; i < n; ++i) {
      resampled[i] = next.particles[idx[i]];
      if (kf_kind) resampled_cov[i] = next.per_particle_cov[idx[i]];
    }
    next.particles = std::move(resampled);
    next.per_particle_cov = std::move(resampled_cov);
    next.weights = VectorXd::Constant(n, 1.0 / n);
  }
  return next;
}

}  // namespace nlkf

#endif
