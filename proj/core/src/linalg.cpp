#include "fedsuplinucb/linalg.hpp"

#include <cmath>
#include <string>

namespace fedsup {
namespace {

constexpr double kNormSlack = 1e-9;  // contexts live on the unit ball

void check_dim(int dim) {
  if (dim < 1) {
    throw std::invalid_argument("ridge stats need dimension >= 1, got " +
                                std::to_string(dim));
  }
}

void check_vector(const Vector& x, int dim) {
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("context dimension mismatch: expected " +
                                std::to_string(dim) + ", got " +
                                std::to_string(x.size()));
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("context has non-finite entries");
  }
  if (x.norm() > 1.0 + kNormSlack) {
    throw std::invalid_argument("context norm " + std::to_string(x.norm()) +
                                " exceeds the unit ball");
  }
}

// log det of a symmetric positive definite matrix via Cholesky.
double spd_log_det(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gram matrix lost positive definiteness");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

DeltaStats::DeltaStats(int dim) {
  check_dim(dim);
  dgram = Matrix::Zero(dim, dim);
  dmoment = Vector::Zero(dim);
}

void DeltaStats::accumulate(const Vector& x, double reward, double weight) {
  check_vector(x, dim());
  if (!std::isfinite(reward) || !std::isfinite(weight)) {
    throw std::invalid_argument("non-finite reward or weight");
  }
  if (weight <= 0.0) {
    throw std::invalid_argument("update weight must be positive");
  }
  dgram.noalias() += weight * x * x.transpose();
  dmoment.noalias() += weight * reward * x;
  ++num_updates;
}

void DeltaStats::clear() {
  dgram.setZero();
  dmoment.setZero();
  num_updates = 0;
}

RidgeStats::RidgeStats(int dim, double lambda) : lambda_(lambda) {
  check_dim(dim);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("ridge lambda must be positive and finite");
  }
  gram_ = Matrix::Identity(dim, dim) * lambda;
  gram_inv_ = Matrix::Identity(dim, dim) / lambda;
  moment_ = Vector::Zero(dim);
  log_det_ = dim * std::log(lambda);
}

void RidgeStats::update(const Vector& x, double reward, double weight) {
  check_vector(x, dim());
  if (!std::isfinite(reward) || !std::isfinite(weight)) {
    throw std::invalid_argument("non-finite reward or weight");
  }
  if (weight <= 0.0) {
    throw std::invalid_argument("update weight must be positive");
  }

  const Vector u = gram_inv_ * x;          // A^{-1} x
  const double q = x.dot(u);               // x' A^{-1} x  (>= 0)
  const double denom = 1.0 + weight * q;
  gram_inv_.noalias() -= (weight / denom) * u * u.transpose();
  gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
  log_det_ += std::log(denom);

  gram_.noalias() += weight * x * x.transpose();
  moment_.noalias() += weight * reward * x;

  if (++updates_since_refactor_ >= 10 * dim()) {
    refactorize();
  }
}

void RidgeStats::merge(const DeltaStats& delta) {
  if (delta.dim() != dim()) {
    throw std::invalid_argument("merge dimension mismatch: expected " +
                                std::to_string(dim()) + ", got " +
                                std::to_string(delta.dim()));
  }
  if (!delta.dgram.allFinite() || !delta.dmoment.allFinite()) {
    throw std::invalid_argument("delta has non-finite entries");
  }
  gram_ += delta.dgram;
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
  moment_ += delta.dmoment;
  refactorize();
}

double RidgeStats::weighted_norm(const Vector& x) const {
  check_vector(x, dim());
  const double q = x.dot(gram_inv_ * x);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

Vector RidgeStats::solve_theta() const { return gram_inv_ * moment_; }

double RidgeStats::log_det_ratio(const DeltaStats& delta) const {
  if (delta.dim() != dim()) {
    throw std::invalid_argument("log_det_ratio dimension mismatch");
  }
  if (delta.zero()) return 0.0;
  // Fresh factorizations on both sides: a delta of exact zeros reproduces the
  // same matrix bits, hence exactly equal log-determinants.
  const double with_delta = spd_log_det(gram_ + delta.dgram);
  const double base = spd_log_det(gram_);
  const double ratio = with_delta - base;
  return ratio > 0.0 ? ratio : 0.0;
}

void RidgeStats::refactorize() {
  Eigen::LLT<Matrix> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gram matrix lost positive definiteness");
  }
  gram_inv_ = llt.solve(Matrix::Identity(dim(), dim()));
  gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
  log_det_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  updates_since_refactor_ = 0;
}

}  // namespace fedsup
