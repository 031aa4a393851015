#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wf/model.hpp"
#include "wf/spectral.hpp"

namespace wf {

struct ConcentrationReport {
  std::string statistic_name;
  std::size_t trials = 0;
  std::vector<double> observed;
  double bound = 0.0;
  // Per-trial envelopes when the bound depends on the trial; empty otherwise.
  std::vector<double> envelopes;
  double violation_rate = 0.0;
  std::optional<double> scaling_slope;
  std::size_t discarded = 0;

  double median() const;
};

struct DesignMaximaReport {
  ConcentrationReport first_entry;  // max_i |a_{i,1}| against 5 sqrt(log m)
  ConcentrationReport row_norm;     // max_i ||a_i|| against sqrt(6 n)
};

struct HessianConcentrationReport {
  std::vector<std::size_t> m_values;
  std::vector<ConcentrationReport> per_m;
  double slope = 0.0;  // of log(median deviation) against log m
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);
double median(std::vector<double> values);

DesignMaximaReport check_design_maxima(std::size_t n, std::size_t m, std::size_t trials,
                                       std::uint64_t seed);

// || (1/m) sum (a_i^T x)^2 a_i a_i^T - ||x||^2 I - 2 x x^T || for the given rows.
double hessian_deviation(const RowMatrix& rows, const Vector& signal);

// Deviation per trial against c0 sqrt(n log^3 m / m), x_nat = e_1.
HessianConcentrationReport check_hessian_concentration(std::size_t n,
                                                       const std::vector<std::size_t>& m_list,
                                                       std::size_t trials, std::uint64_t seed,
                                                       double c0 = 1.0);

// Spectral norm of the Hessian at z via power iteration on the operator form.
SpectralEstimate hessian_spectral_norm(const DesignEnsemble& design, const Vector& z,
                                       std::uint64_t seed);

// ||grad^2 f(z)|| against 10 ||z||^2 + 4 for z drawn independently of the
// design with ||z|| uniform on [min_norm, max_norm]. Trials whose power
// iteration fails to converge are discarded and counted.
ConcentrationReport check_local_smoothness(std::size_t n, std::size_t m, std::size_t z_samples,
                                           std::uint64_t seed, double min_norm = 0.5,
                                           double max_norm = 2.0);

// Six polynomial sample means and their Gaussian limits, for
// z in R^{n-1} and p_i = a_{i,perp}^T z:
//   1: a1^3 p        -> 0            4: a1^6 p^2 -> 15 ||z||^2
//   2: a1 p^3        -> 0            5: a1^2 p^6 -> 15 ||z||^6
//   3: a1^2 p^2      -> ||z||^2      6: a1^2 p^4 -> 3  ||z||^4
struct PolynomialStatistic {
  double mean = 0.0;
  double constant = 0.0;  // limit of mean / ||z||^power
  int power = 0;
  double deviation = 0.0;  // |mean - constant ||z||^power|
  std::optional<double> normalized_deviation;  // absent when z = 0
  std::optional<double> normalized_mean;
};

PolynomialStatistic polynomial_statistic(const RowMatrix& rows, int which, const Vector& z);

struct PolynomialReport {
  ConcentrationReport deviations;      // normalized deviations against epsilon
  std::vector<double> normalized_means;  // per-trial mean / ||z||^power
};

PolynomialReport check_polynomial_concentration(int which, std::size_t n, std::size_t m,
                                                std::size_t trials, std::uint64_t seed,
                                                double epsilon = 0.05);

}  // namespace wf
