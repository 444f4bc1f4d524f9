#include "csimrec/solver1d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "csimrec/errors.hpp"

namespace csimrec {

namespace {

Eigen::VectorXd shrink_step(const SolverState1D& state, const Eigen::MatrixXd& d,
                            double lambda, double sigma) {
  const Eigen::VectorXd residual = state.x + state.eta / sigma - d * state.s;
  const Eigen::VectorXd surrogate = state.s + (d.transpose() * residual) / lambda;
  return soft_threshold(surrogate, state.alpha / (lambda * sigma));
}

double resolve_lambda(const SolverConfig1D& cfg, const Dictionary& d) {
  return cfg.lambda ? *cfg.lambda : d.lambda();
}

}  // namespace

SamplingMask1D::SamplingMask1D(int n, std::vector<int> observed)
    : n_(n), observed_(std::move(observed)) {
  if (n < 1) throw ParameterError("SamplingMask1D: dimension must be >= 1");
  std::sort(observed_.begin(), observed_.end());
  for (std::size_t i = 0; i < observed_.size(); ++i) {
    if (observed_[i] < 0 || observed_[i] >= n) {
      throw ParameterError("SamplingMask1D: index out of range");
    }
    if (i > 0 && observed_[i] == observed_[i - 1]) {
      throw ParameterError("SamplingMask1D: duplicate index");
    }
  }
}

SamplingMask1D SamplingMask1D::full(int n) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  return SamplingMask1D(n, std::move(all));
}

Eigen::VectorXd SamplingMask1D::gather(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw ShapeError("SamplingMask1D::gather: length mismatch");
  Eigen::VectorXd out(m());
  for (int j = 0; j < m(); ++j) out(j) = x(observed_[static_cast<std::size_t>(j)]);
  return out;
}

Eigen::VectorXd SamplingMask1D::scatter(const Eigen::VectorXd& y) const {
  if (y.size() != m()) throw ShapeError("SamplingMask1D::scatter: length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < m(); ++j) out(observed_[static_cast<std::size_t>(j)]) = y(j);
  return out;
}

SolverConfig1D SolverConfig1D::defaults_for(double sr) {
  SolverConfig1D cfg;
  cfg.sigma = 2.0 * sr;
  return cfg;
}

void SolverConfig1D::validate() const {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must be in (0, 1)");
  if (!(zeta > 0.0 && zeta < 1.0)) throw ParameterError("zeta must be in (0, 1)");
  if (!(alpha_min > 0.0)) throw ParameterError("alpha_min must be > 0");
  if (!(rho > 0.0)) throw ParameterError("rho must be > 0");
  if (k0 && !(*k0 > 0.0)) throw ParameterError("k0 must be > 0");
  if (lambda && !(*lambda > 0.0)) throw ParameterError("lambda must be > 0");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw ParameterError("tol must be >= 0");
}

std::string SolverConfig1D::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "sigma=" << sigma << " mu=" << mu << " zeta=" << zeta
     << " alpha_min=" << alpha_min << " rho=" << rho << " k0=";
  if (k0) os << *k0; else os << "n-1";
  os << " lambda=";
  if (lambda) os << *lambda; else os << "dictionary";
  os << " max_iter=" << max_iter << " tol=" << tol
     << " center=" << (center ? "on" : "off");
  return os.str();
}

CsimParams observed_weights(int m, double k0, double rho) {
  if (m == 1) {
    if (!(k0 > 0.0)) throw ParameterError("observed_weights: k0 must be positive");
    if (!(rho > 0.0)) throw ParameterError("observed_weights: rho must be positive");
    CsimParams p;
    p.n = 1;
    p.k0 = k0;
    p.rho = rho;
    p.w1 = k0;
    p.w2 = 0.0;
    return p;
  }
  return csim_weights(m, k0, rho);
}

WoodburyGammas woodbury_gammas(const CsimParams& p, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("woodbury_gammas: sigma must be > 0");
  if (!(p.w1 > 0.0)) {
    throw SingularityError("woodbury_gammas: w1 must be positive");
  }
  const double m = static_cast<double>(p.n);
  const double mean_eig = p.w1 + m * p.w2;
  if (!(mean_eig > 0.0)) {
    throw SingularityError(
        "woodbury_gammas: W is not positive definite on the observed space");
  }
  const double ratio = sigma / (2.0 * p.w1);
  const double beta1 = ratio + 1.0;
  const double beta2 = -ratio * p.w2 / mean_eig;
  WoodburyGammas g;
  g.gamma1 = 1.0 / beta1;
  g.gamma2 = -beta2 / (beta1 * (beta1 + m * beta2));
  return g;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  if (!(t >= 0.0)) throw ParameterError("soft_threshold: threshold must be >= 0");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i)) - t;
    out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
  }
  return out;
}

PatchProblem::PatchProblem(const Eigen::VectorXd& y, const SamplingMask1D& mask,
                           const Dictionary& dict, const SolverConfig1D& cfg)
    : y_(y), mask_(mask), dict_(dict), cfg_(cfg) {
  cfg_.validate();
  if (mask.n() != dict.n()) {
    throw ShapeError("PatchProblem: mask dimension does not match dictionary");
  }
  if (y.size() != mask.m()) {
    throw ShapeError("PatchProblem: observation count does not match mask");
  }
  if (mask.m() == 0) {
    throw UnrecoverableInputError("PatchProblem: no observed samples");
  }
  weights_ = observed_weights(mask.m(), cfg.resolved_k0(mask.n()), cfg.rho);
  gammas_ = woodbury_gammas(weights_, cfg.sigma);
  lambda_ = resolve_lambda(cfg, dict);
  data_term_ = 2.0 * mask.scatter(apply_w(y, weights_));
}

SolverState1D PatchProblem::initial_state() const {
  SolverState1D st;
  st.x = Eigen::VectorXd::Zero(mask_.n());
  st.s = Eigen::VectorXd::Zero(dict_.m_atoms());
  st.eta = Eigen::VectorXd::Zero(mask_.n());
  const Eigen::VectorXd analysis = dict_.atoms().transpose() * mask_.scatter(y_);
  st.alpha = cfg_.zeta * analysis.lpNorm<Eigen::Infinity>();
  st.t = 0;
  return st;
}

Eigen::VectorXd PatchProblem::linear_term(const SolverState1D& state) const {
  return -data_term_ - cfg_.sigma * (dict_.atoms() * state.s) + state.eta;
}

Eigen::VectorXd PatchProblem::x_update(const SolverState1D& state) const {
  if (state.s.size() != dict_.m_atoms() || state.eta.size() != mask_.n()) {
    throw ShapeError("x_update: state does not match problem dimensions");
  }
  const Eigen::VectorXd c = linear_term(state);
  // (I - g1 H^T H - g2 1_H 1_H^T) c, touching only observed coordinates.
  const Eigen::VectorXd c_obs = mask_.gather(c);
  const Eigen::VectorXd correction =
      (gammas_.gamma1 * c_obs.array() + gammas_.gamma2 * c_obs.sum()).matrix();
  return -(c - mask_.scatter(correction)) / cfg_.sigma;
}

Eigen::VectorXd PatchProblem::s_update(const SolverState1D& state) const {
  return shrink_step(state, dict_.atoms(), lambda_, cfg_.sigma);
}

void PatchProblem::iterate(SolverState1D& state) const {
  state.x = x_update(state);
  state.s = s_update(state);
  state.eta += cfg_.sigma * (state.x - dict_.atoms() * state.s);
  state.alpha = std::max(state.alpha * cfg_.mu, cfg_.alpha_min);
  ++state.t;
}

double PatchProblem::augmented_lagrangian(const SolverState1D& state) const {
  const Eigen::VectorXd gap = state.x - dict_.atoms() * state.s;
  return csim_quad(mask_.gather(state.x), y_, weights_) +
         state.alpha * state.s.lpNorm<1>() + state.eta.dot(gap) +
         0.5 * cfg_.sigma * gap.squaredNorm();
}

Eigen::VectorXd PatchProblem::project(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  for (int j = 0; j < mask_.m(); ++j) {
    out(mask_.observed()[static_cast<std::size_t>(j)]) = y_(j);
  }
  return out;
}

Eigen::VectorXd x_update(const SolverState1D& state, const SamplingMask1D& mask,
                         const Eigen::VectorXd& y, const Dictionary& d,
                         const SolverConfig1D& cfg) {
  return PatchProblem(y, mask, d, cfg).x_update(state);
}

Eigen::VectorXd s_update(const SolverState1D& state, const Dictionary& d,
                         const SolverConfig1D& cfg) {
  cfg.validate();
  if (state.s.size() != d.m_atoms() || state.x.size() != d.n() ||
      state.eta.size() != d.n()) {
    throw ShapeError("s_update: state does not match dictionary dimensions");
  }
  return shrink_step(state, d.atoms(), resolve_lambda(cfg, d), cfg.sigma);
}

PatchResult recover_patch(const Eigen::VectorXd& y, const SamplingMask1D& mask,
                          const Dictionary& d, const SolverConfig1D& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const double offset = cfg.center && y.size() > 0 ? y.mean() : 0.0;
  const Eigen::VectorXd centered = (y.array() - offset).matrix();
  const PatchProblem problem(centered, mask, d, cfg);
  SolverState1D state = problem.initial_state();

  PatchResult result;
  result.report.config = cfg.describe();
  while (state.t < cfg.max_iter) {
    const Eigen::VectorXd previous = state.x;
    problem.iterate(state);
    const double change = (state.x - previous).norm();
    const double scale = state.x.norm();
    if (change <= cfg.tol * scale) {
      result.report.converged = true;
      break;
    }
  }
  result.x_hat = (state.x.array() + offset).matrix();
  for (int j = 0; j < mask.m(); ++j) {
    result.x_hat(mask.observed()[static_cast<std::size_t>(j)]) = y(j);
  }
  result.report.iterations = state.t;
  result.report.final_alpha = state.alpha;
  result.report.feasibility = (state.x - d.atoms() * state.s).norm();
  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace csimrec
