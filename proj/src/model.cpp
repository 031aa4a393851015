#include "wf/model.hpp"

#include <cmath>

#include "wf/rng.hpp"

namespace wf {

std::string to_string(DesignKind kind) {
  return kind == DesignKind::Gaussian ? "gaussian" : "rademacher";
}

DesignKind parse_design_kind(const std::string& name) {
  if (name == "gaussian") return DesignKind::Gaussian;
  if (name == "rademacher") return DesignKind::Rademacher;
  throw std::invalid_argument("unknown design kind: " + name);
}

void require_same_size(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

Signal::Signal(Vector entries) : entries_(std::move(entries)), norm_(entries_.norm()) {
  if (entries_.size() < 2) throw std::invalid_argument("signal length must be at least 2");
  if (!entries_.allFinite()) throw std::invalid_argument("signal has non-finite entries");
}

Signal Signal::basis(std::size_t n, double norm) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
  if (n > 0) e[0] = norm;
  return Signal(std::move(e));
}

Signal Signal::random(std::size_t n, std::uint64_t seed, double norm) {
  RandomStream rng(seed, streams::kSignal);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& v_j : v) v_j = rng.normal();
  v *= norm / v.norm();
  return Signal(std::move(v));
}

Vector Signal::direction() const {
  if (norm_ == 0.0) throw std::invalid_argument("zero signal has no direction");
  return entries_ / norm_;
}

bool Signal::is_first_axis() const noexcept {
  return entries_[0] > 0.0 && entries_.tail(entries_.size() - 1).isZero(0.0);
}

DesignEnsemble::DesignEnsemble(RowMatrix rows, DesignKind kind, Vector measurements,
                               std::uint64_t seed, std::uint64_t stream_id)
    : rows_(std::move(rows)),
      kind_(kind),
      measurements_(std::move(measurements)),
      seed_(seed),
      stream_id_(stream_id) {
  require_same_size(m(), static_cast<std::size_t>(measurements_.size()), "measurements");
}

SignFlipVector::SignFlipVector(Vector flips) : flips_(std::move(flips)) {
  for (double f : flips_) {
    if (f != 1.0 && f != -1.0) throw std::invalid_argument("sign flips must be +1 or -1");
  }
}

SignFlipVector SignFlipVector::random(std::size_t m, std::uint64_t seed) {
  RandomStream rng(seed, streams::kSignFlips);
  Vector v(static_cast<Eigen::Index>(m));
  for (auto& v_i : v) v_i = rng.sign();
  return SignFlipVector(std::move(v));
}

SignFlipVector SignFlipVector::matching(const DesignEnsemble& design) {
  Vector v(static_cast<Eigen::Index>(design.m()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = design.rows()(i, 0) < 0.0 ? -1.0 : 1.0;
  return SignFlipVector(std::move(v));
}

SignFlipVector SignFlipVector::ones(std::size_t m) {
  return SignFlipVector(Vector::Ones(static_cast<Eigen::Index>(m)));
}

RowMatrix draw_rows(std::size_t n, std::size_t m, DesignKind kind, std::uint64_t seed,
                    std::uint64_t stream_id) {
  RowMatrix rows(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  RandomStream rng(seed, stream_id);
  double* data = rows.data();
  const std::size_t total = m * n;
  if (kind == DesignKind::Gaussian) {
    for (std::size_t k = 0; k < total; ++k) data[k] = rng.normal();
  } else {
    for (std::size_t k = 0; k < total; ++k) data[k] = rng.sign();
  }
  return rows;
}

DesignEnsemble generate_design(std::size_t n, std::size_t m, DesignKind kind, const Signal& signal,
                               std::uint64_t seed, std::uint64_t stream_id) {
  if (n < 2) throw std::invalid_argument("design dimension n must be at least 2");
  if (m < 1) throw std::invalid_argument("sample count m must be positive");
  require_same_size(n, signal.size(), "signal");
  RowMatrix rows = draw_rows(n, m, kind, seed, stream_id);
  Vector y = measure(rows, signal);
  return DesignEnsemble(std::move(rows), kind, std::move(y), seed, stream_id);
}

Vector measure(const RowMatrix& rows, const Signal& signal) {
  require_same_size(static_cast<std::size_t>(rows.cols()), signal.size(), "signal");
  Vector y(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double s = rows.row(i).dot(signal.entries());
    y[i] = s * s;
  }
  return y;
}

DesignEnsemble flip_first_entry(const DesignEnsemble& design, const SignFlipVector& flips) {
  require_same_size(design.m(), flips.size(), "sign flips");
  RowMatrix rows = design.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    rows(i, 0) = flips.values()[i] * std::abs(rows(i, 0));
  }
  return DesignEnsemble(std::move(rows), design.kind(), design.measurements(), design.seed(),
                        design.stream_id());
}

Decomposition decompose(const Vector& x, const Signal& signal) {
  require_same_size(signal.size(), static_cast<std::size_t>(x.size()), "iterate");
  const Vector u = signal.direction();
  Decomposition d;
  d.parallel = x.dot(u);
  d.orthogonal = x - d.parallel * u;
  d.orthogonal_norm = d.orthogonal.norm();
  return d;
}

}  // namespace wf
