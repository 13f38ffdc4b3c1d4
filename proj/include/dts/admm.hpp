#pragma once

#include <optional>
#include <vector>

#include "dts/errors.hpp"
#include "dts/types.hpp"

namespace dts {

/// Weights of
///   min_A ||Y - L D A||_F^2 + lambda ||A||_1 + gamma ||[A A_u]||_*
/// and the ADMM penalty mu. The penalty is fixed so that
/// (L D)^T (L D) + 2 mu I is factored once per solve.
struct AdmmConfig {
  double lambda = 1e-2;
  double gamma = 1e-2;
  double mu = 1e-2;
  int max_iters = 500;
  double primal_tol = 1e-4;
  double dual_tol = 1e-4;
  Index warm_start_sparsity = 4;
};

/// ADMM iterate for the split G = A_x, H = [A_x A_u].
struct AdmmState {
  Matrix a_x;  // K x N
  Matrix g;    // K x N
  Matrix h;    // K x (N + K)
  Matrix v1;   // K x N
  Matrix v2;   // K x (N + K)
  int iteration = 0;
  double residual_g = 0.0;   // ||G - A_x||_F
  double residual_h = 0.0;   // ||H - [A_x A_u]||_F
  double dual_change = 0.0;  // 2 mu ||(G, H) - (G, H)_prev||_F
  std::vector<double> objective_trace;
};

double soft_threshold(double x, double tau);
Matrix soft_threshold(const Matrix& m, double tau);

/// U max(S - tau, 0) V^T from the SVD of m. Throws NumericalError on
/// non-finite input.
Matrix singular_value_threshold(const Matrix& m, double tau);

/// Column slice H C with C = [I_N 0]^T, i.e. the first n columns of h.
inline auto select_leading(const Matrix& h, Index n) { return h.leftCols(n); }

/// Problem data shared by every iteration: the system matrix L D, its
/// regularized normal-equations factorization and (L D)^T Y.
class AdmmProblem {
 public:
  AdmmProblem(const Matrix& y, const SpectralResponse& srf, const SpectralDictionary& dict,
              const Matrix& a_u, const AdmmConfig& cfg);

  const Matrix& system() const { return system_; }
  const Matrix& observations() const { return y_; }
  const Matrix& side_codes() const { return a_u_; }
  const AdmmConfig& config() const { return cfg_; }
  Index atoms() const { return system_.cols(); }
  Index pixels() const { return y_.cols(); }

  /// Value of the regularized objective at a_x.
  double objective(const Matrix& a_x) const;

  /// G = A_x, H = [A_x A_u], V1 = V2 = 0, trace seeded with the objective.
  AdmmState initial_state(const Matrix& a_x) const;

  /// OMP of every observed pixel against the column-normalized system
  /// matrix with the warm-start sparsity budget, rescaled back.
  Matrix warm_start() const;

  /// One sweep: G, H, A_x, then the multipliers. Throws NumericalError naming
  /// the iteration if anything becomes non-finite.
  void step(AdmmState& state) const;

 private:
  Matrix y_;
  Matrix a_u_;
  Matrix system_;
  Matrix system_t_y_;
  Eigen::LLT<Matrix> normal_;
  AdmmConfig cfg_;
};

/// Single update from `state` (builds the problem; prefer AdmmProblem::step
/// inside loops).
AdmmState admm_step(const AdmmState& state, const Matrix& y, const SpectralResponse& srf,
                    const SpectralDictionary& dict, const Matrix& a_u, const AdmmConfig& cfg);

struct AdmmDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective;     // entry 0 is the initial point
  std::vector<double> residual_g;
  std::vector<double> residual_h;
  std::vector<double> dual_change;
  double final_objective = 0.0;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, AdmmDiagnostics trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const AdmmDiagnostics& trace() const { return trace_; }

 private:
  AdmmDiagnostics trace_;
};

struct AdmmSolution {
  CoefficientMatrix a_x;
  AdmmDiagnostics diagnostics;
};

/// Runs ADMM until ||G - A_x||, ||H - [A_x A_u]|| < primal_tol * max(1, ||A_x||)
/// and the dual change < dual_tol * max(1, ||A_x||), or max_iters.
/// `initial` overrides the OMP warm start. Throws DivergenceError when the
/// objective stays above 10x its initial value for 10 consecutive iterations.
AdmmSolution solve_coefficients(const Matrix& y, const SpectralResponse& srf,
                                const SpectralDictionary& dict, const Matrix& a_u,
                                const AdmmConfig& cfg,
                                const std::optional<Matrix>& initial = std::nullopt);

/// bands x rows x cols cube with as_matrix = D A_x.
SpectralCube reconstruct(const SpectralDictionary& dict, const CoefficientMatrix& a_x,
                         std::size_t rows, std::size_t cols);

}  // namespace dts
