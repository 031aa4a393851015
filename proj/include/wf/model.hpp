#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class DesignKind { Gaussian, Rademacher };

std::string to_string(DesignKind kind);
DesignKind parse_design_kind(const std::string& name);

// Ground-truth signal. Zero signals are representable (measurements vanish)
// but cannot be used to decompose an iterate.
class Signal {
 public:
  explicit Signal(Vector entries);

  // e_1 scaled to the given norm.
  static Signal basis(std::size_t n, double norm = 1.0);
  // Direction uniform on the sphere, scaled to the given norm.
  static Signal random(std::size_t n, std::uint64_t seed, double norm = 1.0);

  const Vector& entries() const noexcept { return entries_; }
  double norm() const noexcept { return norm_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.size()); }
  // Unit vector along the signal; throws std::invalid_argument for zero signals.
  Vector direction() const;
  // True when the signal is a positive multiple of e_1.
  bool is_first_axis() const noexcept;

 private:
  Vector entries_;
  double norm_;
};

// The m design vectors (row-major, one a_i per row) and their measurements.
class DesignEnsemble {
 public:
  DesignEnsemble(RowMatrix rows, DesignKind kind, Vector measurements, std::uint64_t seed,
                 std::uint64_t stream_id);

  const RowMatrix& rows() const noexcept { return rows_; }
  const Vector& measurements() const noexcept { return measurements_; }
  DesignKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::size_t m() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.cols()); }

 private:
  RowMatrix rows_;
  DesignKind kind_;
  Vector measurements_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

class SignFlipVector {
 public:
  explicit SignFlipVector(Vector flips);

  // Fair coin per sample.
  static SignFlipVector random(std::size_t m, std::uint64_t seed);
  // xi_i = sgn(a_{i,1}) (zero maps to +1); flipping with these reproduces the design.
  static SignFlipVector matching(const DesignEnsemble& design);
  static SignFlipVector ones(std::size_t m);

  const Vector& values() const noexcept { return flips_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(flips_.size()); }

 private:
  Vector flips_;
};

struct Decomposition {
  double parallel = 0.0;         // <x, u> with u the unit signal direction
  double orthogonal_norm = 0.0;  // ||x - parallel * u||
  Vector orthogonal;
};

// Raw m x n block of draws from the (seed, stream_id) stream, filled row by row.
RowMatrix draw_rows(std::size_t n, std::size_t m, DesignKind kind, std::uint64_t seed,
                    std::uint64_t stream_id);

DesignEnsemble generate_design(std::size_t n, std::size_t m, DesignKind kind, const Signal& signal,
                               std::uint64_t seed, std::uint64_t stream_id = 1);

Vector measure(const RowMatrix& rows, const Signal& signal);

// Replaces a_{i,1} with xi_i * |a_{i,1}|; measurements are carried over unchanged.
DesignEnsemble flip_first_entry(const DesignEnsemble& design, const SignFlipVector& flips);

Decomposition decompose(const Vector& x, const Signal& signal);

// Throws std::invalid_argument with a message naming `what` when sizes differ.
void require_same_size(std::size_t expected, std::size_t actual, const char* what);

}  // namespace wf
