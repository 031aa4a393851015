#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "wf/model.hpp"

namespace wf {

class UnsupportedConvention : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One fused pass over the design at a point x. `max_projection` is
// max_i |a_i^T x| over the rows that were read.
struct Evaluation {
  double loss = 0.0;
  Vector gradient;
  double max_projection = 0.0;
};

// Loss, gradient and max projection in a single sweep over the rows. When
// `skip_row` is set that row is never read; the 1/m normalization is kept.
Evaluation evaluate(const DesignEnsemble& design, const Vector& x,
                    std::optional<std::size_t> skip_row = std::nullopt);

double loss(const DesignEnsemble& design, const Vector& x);
Vector gradient(const DesignEnsemble& design, const Vector& x);
Matrix hessian(const DesignEnsemble& design, const Vector& x);

// Matrix-free Hessian: v -> (1/m) sum_i c_i a_i a_i^T v with
// c_i = 3 (a_i^T x)^2 - y_i. Keeps a reference to the design.
class HessianOperator {
 public:
  HessianOperator(const DesignEnsemble& design, const Vector& x);

  Vector apply(const Vector& v) const;
  std::size_t size() const noexcept { return design_->n(); }

 private:
  const DesignEnsemble* design_;
  Vector weights_;
};

// E[grad f(x)] over a Gaussian design:
// (3||x||^2 - ||x_nat||^2) x - 2 <x_nat, x> x_nat.
Vector population_gradient(const Vector& x, const Signal& signal);

// E[f(x)] over a Gaussian design.
double population_loss(const Vector& x, const Signal& signal);

enum class ResidualTerms { Skip, Compute };

// r(x) = grad f(x) - grad F(x) and, under the x_nat = e_1 convention, the
// four-term split of its first coordinate. The terms are signed so that
// r1 = i1 + i2 - i3 - i4.
struct ResidualBreakdown {
  bool has_terms = false;
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;
  double r1 = 0.0;  // <r(x), u>, u the unit signal direction
  Vector fluctuation;
  double fluctuation_norm = 0.0;
};

ResidualBreakdown fluctuation(const DesignEnsemble& design, const Vector& x, const Signal& signal,
                              ResidualTerms terms = ResidualTerms::Compute);

}  // namespace wf
