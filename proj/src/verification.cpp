#include "wf/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wf/objective.hpp"
#include "wf/rng.hpp"

namespace wf {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double ConcentrationReport::median() const { return wf::median(observed); }

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("line fit needs at least two paired points");
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

namespace {

void finish(ConcentrationReport& report) {
  report.trials = report.observed.size();
  std::size_t violations = 0;
  for (std::size_t k = 0; k < report.observed.size(); ++k) {
    const double bound = report.envelopes.empty() ? report.bound : report.envelopes[k];
    if (report.observed[k] > bound) ++violations;
  }
  report.violation_rate =
      report.observed.empty() ? 0.0
                              : static_cast<double>(violations) / static_cast<double>(report.trials);
}

std::uint64_t trial_stream(std::size_t trial) { return streams::kTrialBase + trial; }

}  // namespace

DesignMaximaReport check_design_maxima(std::size_t n, std::size_t m, std::size_t trials,
                                       std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  DesignMaximaReport report;
  report.first_entry.statistic_name = "max_abs_first_entry";
  report.first_entry.bound = 5.0 * std::sqrt(std::log(static_cast<double>(m)));
  report.row_norm.statistic_name = "max_row_norm";
  report.row_norm.bound = std::sqrt(6.0 * static_cast<double>(n));
  for (std::size_t k = 0; k < trials; ++k) {
    const RowMatrix rows = draw_rows(n, m, DesignKind::Gaussian, seed, trial_stream(k));
    report.first_entry.observed.push_back(rows.col(0).cwiseAbs().maxCoeff());
    report.row_norm.observed.push_back(rows.rowwise().norm().maxCoeff());
  }
  finish(report.first_entry);
  finish(report.row_norm);
  return report;
}

double hessian_deviation(const RowMatrix& rows, const Vector& signal) {
  if (rows.cols() != signal.size()) throw std::invalid_argument("signal length mismatch");
  const Vector w = (rows * signal).array().square();
  Matrix dev = rows.transpose() * w.asDiagonal() * rows;
  dev /= static_cast<double>(rows.rows());
  dev -= signal.squaredNorm() * Matrix::Identity(rows.cols(), rows.cols());
  dev -= 2.0 * signal * signal.transpose();
  return dense_spectral_norm(0.5 * (dev + dev.transpose()));
}

HessianConcentrationReport check_hessian_concentration(std::size_t n,
                                                       const std::vector<std::size_t>& m_list,
                                                       std::size_t trials, std::uint64_t seed,
                                                       double c0) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (m_list.empty()) throw std::invalid_argument("need at least one sample size");
  HessianConcentrationReport report;
  report.m_values = m_list;
  Vector e1 = Vector::Zero(static_cast<Eigen::Index>(n));
  e1[0] = 1.0;

  std::vector<double> log_m, log_median;
  for (std::size_t j = 0; j < m_list.size(); ++j) {
    const std::size_t m = m_list[j];
    ConcentrationReport r;
    r.statistic_name = "hessian_deviation_m" + std::to_string(m);
    const double lm = std::log(static_cast<double>(m));
    r.bound = c0 * std::sqrt(static_cast<double>(n) * lm * lm * lm / static_cast<double>(m));
    for (std::size_t k = 0; k < trials; ++k) {
      const RowMatrix rows =
          draw_rows(n, m, DesignKind::Gaussian, seed, trial_stream(j * trials + k));
      r.observed.push_back(hessian_deviation(rows, e1));
    }
    finish(r);
    log_m.push_back(lm);
    log_median.push_back(std::log(r.median()));
    report.per_m.push_back(std::move(r));
  }
  if (m_list.size() >= 2) {
    report.slope = fit_line(log_m, log_median).slope;
    for (auto& r : report.per_m) r.scaling_slope = report.slope;
  }
  return report;
}

SpectralEstimate hessian_spectral_norm(const DesignEnsemble& design, const Vector& z,
                                       std::uint64_t seed) {
  const HessianOperator op(design, z);
  return power_iteration([&](const Vector& v) { return op.apply(v); }, design.n(), seed);
}

ConcentrationReport check_local_smoothness(std::size_t n, std::size_t m, std::size_t z_samples,
                                           std::uint64_t seed, double min_norm, double max_norm) {
  const DesignEnsemble design =
      generate_design(n, m, DesignKind::Gaussian, Signal::basis(n), seed, streams::kDesign);
  ConcentrationReport report;
  report.statistic_name = "hessian_norm_incoherent_z";
  report.bound = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < z_samples; ++k) {
    RandomStream rng(seed, trial_stream(k));
    Vector z(static_cast<Eigen::Index>(n));
    for (auto& z_j : z) z_j = rng.normal();
    const double radius = min_norm + (max_norm - min_norm) * (1.0 - rng.uniform());
    z *= radius / z.norm();
    const SpectralEstimate est = hessian_spectral_norm(design, z, seed + k);
    if (!est.converged) {
      ++report.discarded;
      continue;
    }
    report.observed.push_back(est.norm);
    report.envelopes.push_back(10.0 * z.squaredNorm() + 4.0);
  }
  finish(report);
  return report;
}

PolynomialStatistic polynomial_statistic(const RowMatrix& rows, int which, const Vector& z) {
  if (which < 1 || which > 6) throw std::invalid_argument("unknown polynomial case");
  if (z.size() != rows.cols() - 1) throw std::invalid_argument("z must have length n - 1");
  static constexpr double kConstant[] = {0.0, 0.0, 1.0, 15.0, 15.0, 3.0};
  static constexpr int kPower[] = {1, 3, 2, 2, 6, 4};

  const Eigen::Index tail = rows.cols() - 1;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double a = rows(i, 0);
    const double p = rows.row(i).tail(tail).dot(z);
    const double a2 = a * a, p2 = p * p;
    switch (which) {
      case 1: sum += a2 * a * p; break;
      case 2: sum += a * p2 * p; break;
      case 3: sum += a2 * p2; break;
      case 4: sum += a2 * a2 * a2 * p2; break;
      case 5: sum += a2 * p2 * p2 * p2; break;
      case 6: sum += a2 * p2 * p2; break;
    }
  }
  PolynomialStatistic s;
  s.mean = sum / static_cast<double>(rows.rows());
  s.constant = kConstant[which - 1];
  s.power = kPower[which - 1];
  const double scale = std::pow(z.norm(), s.power);
  s.deviation = std::abs(s.mean - s.constant * scale);
  if (scale > 0.0) {
    s.normalized_deviation = s.deviation / scale;
    s.normalized_mean = s.mean / scale;
  }
  return s;
}

PolynomialReport check_polynomial_concentration(int which, std::size_t n, std::size_t m,
                                                std::size_t trials, std::uint64_t seed,
                                                double epsilon) {
  if (which < 1 || which > 6) throw std::invalid_argument("unknown polynomial case");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  PolynomialReport report;
  report.deviations.statistic_name = "polynomial_case_" + std::to_string(which);
  report.deviations.bound = epsilon;
  for (std::size_t k = 0; k < trials; ++k) {
    const RowMatrix rows = draw_rows(n, m, DesignKind::Gaussian, seed, trial_stream(2 * k));
    RandomStream rng(seed, trial_stream(2 * k + 1));
    Vector z(static_cast<Eigen::Index>(n - 1));
    for (auto& z_j : z) z_j = rng.normal();
    const PolynomialStatistic s = polynomial_statistic(rows, which, z);
    report.deviations.observed.push_back(*s.normalized_deviation);
    report.normalized_means.push_back(*s.normalized_mean);
  }
  finish(report.deviations);
  return report;
}

}  // namespace wf
