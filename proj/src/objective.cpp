#include "wf/objective.hpp"

#include <algorithm>
#include <cmath>

namespace wf {

namespace {

void check_point(const DesignEnsemble& design, const Vector& x) {
  require_same_size(design.n(), static_cast<std::size_t>(x.size()), "iterate");
}

}  // namespace

Evaluation evaluate(const DesignEnsemble& design, const Vector& x,
                    std::optional<std::size_t> skip_row) {
  check_point(design, x);
  const auto& rows = design.rows();
  const auto& y = design.measurements();
  const Eigen::Index m = rows.rows();
  if (skip_row && *skip_row >= design.m()) throw std::out_of_range("left-out row index out of range");
  const Eigen::Index skip = skip_row ? static_cast<Eigen::Index>(*skip_row) : -1;

  Evaluation out;
  out.gradient = Vector::Zero(x.size());
  double loss_sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i == skip) continue;
    const auto a = rows.row(i);
    const double s = a.dot(x);
    const double r = s * s - y[i];
    loss_sum += r * r;
    out.max_projection = std::max(out.max_projection, std::abs(s));
    out.gradient.noalias() += (r * s) * a.transpose();
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  out.loss = 0.25 * inv_m * loss_sum;
  out.gradient *= inv_m;
  return out;
}

double loss(const DesignEnsemble& design, const Vector& x) {
  check_point(design, x);
  const Vector s = design.rows() * x;
  const double sum = (s.array().square() - design.measurements().array()).square().sum();
  return 0.25 * sum / static_cast<double>(design.m());
}

Vector gradient(const DesignEnsemble& design, const Vector& x) {
  return evaluate(design, x).gradient;
}

Matrix hessian(const DesignEnsemble& design, const Vector& x) {
  check_point(design, x);
  const auto& rows = design.rows();
  const Vector s = rows * x;
  const Vector w = 3.0 * s.array().square() - design.measurements().array();
  Matrix h = rows.transpose() * w.asDiagonal() * rows;
  h /= static_cast<double>(design.m());
  // Restore exact symmetry lost to summation order.
  return 0.5 * (h + h.transpose());
}

HessianOperator::HessianOperator(const DesignEnsemble& design, const Vector& x) : design_(&design) {
  check_point(design, x);
  const Vector s = design.rows() * x;
  weights_ = (3.0 * s.array().square() - design.measurements().array()).matrix() /
             static_cast<double>(design.m());
}

Vector HessianOperator::apply(const Vector& v) const {
  require_same_size(size(), static_cast<std::size_t>(v.size()), "operand");
  const Vector s = design_->rows() * v;
  return design_->rows().transpose() * weights_.cwiseProduct(s);
}

Vector population_gradient(const Vector& x, const Signal& signal) {
  require_same_size(signal.size(), static_cast<std::size_t>(x.size()), "iterate");
  const auto& xs = signal.entries();
  const double sn2 = signal.norm() * signal.norm();
  return (3.0 * x.squaredNorm() - sn2) * x - 2.0 * xs.dot(x) * xs;
}

double population_loss(const Vector& x, const Signal& signal) {
  require_same_size(signal.size(), static_cast<std::size_t>(x.size()), "iterate");
  const double xx = x.squaredNorm();
  const double ss = signal.norm() * signal.norm();
  const double xs = x.dot(signal.entries());
  return 0.25 * (3.0 * xx * xx - 2.0 * (xx * ss + 2.0 * xs * xs) + 3.0 * ss * ss);
}

ResidualBreakdown fluctuation(const DesignEnsemble& design, const Vector& x, const Signal& signal,
                              ResidualTerms terms) {
  check_point(design, x);
  require_same_size(design.n(), signal.size(), "signal");
  const bool unit_first_axis = signal.is_first_axis() && std::abs(signal.norm() - 1.0) <= 1e-12;
  if (terms == ResidualTerms::Compute && !unit_first_axis) {
    throw UnsupportedConvention("residual terms require the signal to be e_1");
  }

  ResidualBreakdown out;
  out.fluctuation = gradient(design, x) - population_gradient(x, signal);
  out.fluctuation_norm = out.fluctuation.norm();
  out.r1 = out.fluctuation.dot(signal.direction());
  if (terms == ResidualTerms::Skip) return out;

  const auto& rows = design.rows();
  const Eigen::Index m = rows.rows();
  const Eigen::Index tail = rows.cols() - 1;
  const double x1 = x[0];
  const auto x_perp = x.tail(tail);
  double m4 = 0.0, m31 = 0.0, m22 = 0.0, m13 = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a1 = rows(i, 0);
    const double p = rows.row(i).tail(tail).dot(x_perp);
    const double a1sq = a1 * a1;
    m4 += a1sq * a1sq;
    m31 += a1sq * a1 * p;
    m22 += a1sq * p * p;
    m13 += a1 * p * p * p;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  m4 *= inv_m;
  m31 *= inv_m;
  m22 *= inv_m;
  m13 *= inv_m;

  out.has_terms = true;
  out.i1 = (x1 * x1 - 1.0) * x1 * (m4 - 3.0);
  out.i2 = (3.0 * x1 * x1 - 1.0) * m31;
  out.i3 = -3.0 * x1 * (m22 - x_perp.squaredNorm());
  out.i4 = -m13;
  return out;
}

}  // namespace wf
