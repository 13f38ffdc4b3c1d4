#include "dts/admm.hpp"

#include <algorithm>
#include <cmath>

#include "dts/sparse_coding.hpp"

namespace dts {
namespace {

constexpr double kDivergenceFactor = 10.0;
constexpr int kDivergencePatience = 10;

double nuclear_norm(const Matrix& m) {
  // Singular values from the smaller Gram matrix; only used for reporting.
  const Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

Matrix concat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

Matrix soft_threshold(const Matrix& m, double tau) {
  return m.unaryExpr([tau](double x) { return soft_threshold(x, tau); });
}

Matrix singular_value_threshold(const Matrix& m, double tau) {
  if (tau < 0.0) throw InvariantError("singular_value_threshold: tau must be >= 0");
  if (!m.allFinite()) throw NumericalError("singular_value_threshold: non-finite input");
  if (m.size() == 0) return m;
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector shrunk = (svd.singularValues().array() - tau).cwiseMax(0.0).matrix();
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

AdmmProblem::AdmmProblem(const Matrix& y, const SpectralResponse& srf,
                         const SpectralDictionary& dict, const Matrix& a_u,
                         const AdmmConfig& cfg)
    : y_(y), a_u_(a_u), cfg_(cfg) {
  if (!(cfg.mu > 0.0) || !(cfg.primal_tol > 0.0) || !(cfg.dual_tol > 0.0) ||
      cfg.lambda < 0.0 || cfg.gamma < 0.0 || cfg.max_iters < 1) {
    throw InvariantError("admm: need mu > 0, tolerances > 0, lambda, gamma >= 0, max_iters >= 1");
  }
  if (dict.bands() != srf.in_bands()) {
    throw ShapeError("admm: dictionary has " + std::to_string(dict.bands()) +
                     " bands, spectral response expects " + std::to_string(srf.in_bands()));
  }
  if (y.rows() != srf.out_bands()) {
    throw ShapeError("admm: observations have " + std::to_string(y.rows()) +
                     " bands, spectral response produces " + std::to_string(srf.out_bands()));
  }
  if (a_u.rows() != dict.atoms()) {
    throw ShapeError("admm: side codes have " + std::to_string(a_u.rows()) +
                     " atoms, dictionary has " + std::to_string(dict.atoms()));
  }
  system_ = srf.weights() * dict.columns();
  system_t_y_ = system_.transpose() * y_;
  Matrix normal = system_.transpose() * system_;
  normal.diagonal().array() += 2.0 * cfg_.mu;
  normal_.compute(normal);
  if (normal_.info() != Eigen::Success) {
    throw NumericalError("admm: (LD)^T LD + 2 mu I is not positive definite");
  }
}

double AdmmProblem::objective(const Matrix& a_x) const {
  double value = (y_ - system_ * a_x).squaredNorm();
  if (cfg_.lambda != 0.0) value += cfg_.lambda * a_x.cwiseAbs().sum();
  if (cfg_.gamma != 0.0) value += cfg_.gamma * nuclear_norm(concat(a_x, a_u_));
  return value;
}

AdmmState AdmmProblem::initial_state(const Matrix& a_x) const {
  if (a_x.rows() != atoms() || a_x.cols() != pixels()) {
    throw ShapeError("admm: initial coefficients " + shape_string(a_x) + " expected " +
                     std::to_string(atoms()) + "x" + std::to_string(pixels()));
  }
  AdmmState s;
  s.a_x = a_x;
  s.g = a_x;
  s.h = concat(a_x, a_u_);
  s.v1 = Matrix::Zero(a_x.rows(), a_x.cols());
  s.v2 = Matrix::Zero(s.h.rows(), s.h.cols());
  s.objective_trace.push_back(objective(a_x));
  return s;
}

Matrix AdmmProblem::warm_start() const {
  const Vector norms = system_.colwise().norm().transpose();
  Matrix normalized = system_;
  std::vector<Index> usable;
  for (Index k = 0; k < system_.cols(); ++k) {
    if (norms(k) > 0.0) {
      normalized.col(k) /= norms(k);
      usable.push_back(k);
    }
  }
  Matrix reduced(system_.rows(), static_cast<Index>(usable.size()));
  for (std::size_t i = 0; i < usable.size(); ++i) reduced.col(static_cast<Index>(i)) = normalized.col(usable[i]);

  Matrix out = Matrix::Zero(atoms(), pixels());
  if (usable.empty()) return out;
  const auto codes = batch_code(reduced, y_, OmpConfig{cfg_.warm_start_sparsity, 0.0});
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const Index k = usable[i];
    out.row(k) = codes.values.row(static_cast<Index>(i)) / norms(k);
  }
  return out;
}

void AdmmProblem::step(AdmmState& s) const {
  const double two_mu = 2.0 * cfg_.mu;
  const Index n = pixels();
  const Matrix g_prev = s.g;
  const Matrix h_prev = s.h;

  s.g = soft_threshold(s.a_x - s.v1 / two_mu, cfg_.lambda / two_mu);
  s.h = singular_value_threshold(concat(s.a_x, a_u_) - s.v2 / two_mu, cfg_.gamma / two_mu);

  const Matrix rhs = system_t_y_ + cfg_.mu * (s.g + s.v1 / two_mu) +
                     cfg_.mu * (select_leading(s.h, n) + select_leading(s.v2, n) / two_mu);
  s.a_x = normal_.solve(rhs);

  const Matrix joined = concat(s.a_x, a_u_);
  s.v1 += two_mu * (s.g - s.a_x);
  s.v2 += two_mu * (s.h - joined);
  ++s.iteration;

  if (!s.a_x.allFinite() || !s.v1.allFinite() || !s.v2.allFinite()) {
    throw NumericalError("admm: non-finite iterate at iteration " + std::to_string(s.iteration));
  }
  s.residual_g = (s.g - s.a_x).norm();
  s.residual_h = (s.h - joined).norm();
  s.dual_change =
      two_mu * std::sqrt((s.g - g_prev).squaredNorm() + (s.h - h_prev).squaredNorm());
  s.objective_trace.push_back(objective(s.a_x));
}

AdmmState admm_step(const AdmmState& state, const Matrix& y, const SpectralResponse& srf,
                    const SpectralDictionary& dict, const Matrix& a_u, const AdmmConfig& cfg) {
  AdmmProblem problem(y, srf, dict, a_u, cfg);
  AdmmState next = state;
  problem.step(next);
  return next;
}

AdmmSolution solve_coefficients(const Matrix& y, const SpectralResponse& srf,
                                const SpectralDictionary& dict, const Matrix& a_u,
                                const AdmmConfig& cfg, const std::optional<Matrix>& initial) {
  AdmmProblem problem(y, srf, dict, a_u, cfg);
  AdmmState state = problem.initial_state(initial ? *initial : problem.warm_start());

  AdmmDiagnostics diag;
  diag.objective.push_back(state.objective_trace.front());
  const double start = state.objective_trace.front();
  int above = 0;

  while (state.iteration < cfg.max_iters) {
    problem.step(state);
    const double obj = state.objective_trace.back();
    diag.objective.push_back(obj);
    diag.residual_g.push_back(state.residual_g);
    diag.residual_h.push_back(state.residual_h);
    diag.dual_change.push_back(state.dual_change);

    above = obj > kDivergenceFactor * start ? above + 1 : 0;
    if (above >= kDivergencePatience) {
      diag.iterations = state.iteration;
      diag.final_objective = obj;
      throw DivergenceError("admm: objective above 10x its initial value for 10 iterations (at " +
                                std::to_string(state.iteration) + ")",
                            std::move(diag));
    }

    const double scale = std::max(1.0, state.a_x.norm());
    if (state.residual_g < cfg.primal_tol * scale && state.residual_h < cfg.primal_tol * scale &&
        state.dual_change < cfg.dual_tol * scale) {
      diag.converged = true;
      break;
    }
  }
  diag.iterations = state.iteration;
  diag.final_objective = state.objective_trace.back();
  return AdmmSolution{CoefficientMatrix{std::move(state.a_x), std::nullopt, {}}, std::move(diag)};
}

SpectralCube reconstruct(const SpectralDictionary& dict, const CoefficientMatrix& a_x,
                         std::size_t rows, std::size_t cols) {
  if (a_x.atoms() != dict.atoms()) {
    throw ShapeError("reconstruct: codes have " + std::to_string(a_x.atoms()) +
                     " atoms, dictionary has " + std::to_string(dict.atoms()));
  }
  if (static_cast<std::size_t>(a_x.samples()) != rows * cols) {
    throw ShapeError("reconstruct: " + std::to_string(a_x.samples()) + " code columns cannot fill " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  return from_matrix(dict.columns() * a_x.values, rows, cols);
}

}  // namespace dts
