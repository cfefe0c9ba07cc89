#pragma once

// Incremental ridge regression statistics, the substrate every bandit layer
// is built on.
//
// RidgeStats holds the regularized Gram matrix A = lambda*I + sum_i w_i x_i x_i',
// the moment vector b = sum_i w_i r_i x_i, a cached inverse of A and log det A.
// Rank-one updates maintain the inverse by Sherman-Morrison and the
// log-determinant by the matrix determinant lemma,
//
//   (A + w x x')^{-1} = A^{-1} - w (A^{-1} x)(A^{-1} x)' / (1 + w x' A^{-1} x)
//   log det(A + w x x') = log det A + log(1 + w x' A^{-1} x),
//
// with a full refactorization every 10*d updates so float drift stays
// bounded. Merging a batch of deltas always refactorizes. Determinants are
// kept in log space throughout; nothing here ever forms det(A) itself.

#include <Eigen/Dense>

#include <stdexcept>

namespace fedsup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Pending (unsynced) observations, kept as plain sums so deltas can be merged
// into any RidgeStats of matching dimension or shipped over the wire.
struct DeltaStats {
  Matrix dgram;
  Vector dmoment;
  long num_updates = 0;

  explicit DeltaStats(int dim);

  int dim() const { return static_cast<int>(dmoment.size()); }
  bool zero() const { return num_updates == 0; }

  void accumulate(const Vector& x, double reward, double weight = 1.0);
  void clear();
};

class RidgeStats {
 public:
  explicit RidgeStats(int dim, double lambda = 1.0);

  int dim() const { return static_cast<int>(moment_.size()); }
  double lambda() const { return lambda_; }
  const Matrix& gram() const { return gram_; }
  const Vector& moment() const { return moment_; }
  const Matrix& gram_inv() const { return gram_inv_; }
  double log_det() const { return log_det_; }

  // Rank-one observation. Requires finite inputs, |x|_2 <= 1 + 1e-9 and
  // weight > 0. Weights carry the variance / corruption reweighting.
  void update(const Vector& x, double reward, double weight = 1.0);

  // Folds a pending delta in and refactorizes inverse and log-determinant.
  void merge(const DeltaStats& delta);

  // sqrt(x' A^{-1} x), the confidence ellipsoid half-width without the alpha
  // multiplier. Zero vectors give exactly zero.
  double weighted_norm(const Vector& x) const;

  // Ridge estimate theta_hat = A^{-1} b.
  Vector solve_theta() const;

  // log det(A + dgram) - log det(A), clamped at zero. Both determinants are
  // evaluated from fresh factorizations of the same storage so a zero delta
  // returns exactly 0.
  double log_det_ratio(const DeltaStats& delta) const;

 private:
  void refactorize();

  Matrix gram_;
  Matrix gram_inv_;
  Vector moment_;
  double log_det_ = 0.0;
  double lambda_ = 1.0;
  int updates_since_refactor_ = 0;
};

}  // namespace fedsup
