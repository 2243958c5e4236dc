#pragma once

// Truncated Fourier series on the torus T^q and their sampled grid values.
//
// A FourierSeries holds a rows x cols matrix of real-valued periodic
// functions, stored as complex coefficients c_k for every k in the box
// |k_i| <= N_i. Coefficients are kept Hermitian (c_{-k} = conj(c_k)).
// GridField holds the same kind of matrix function sampled on the uniform
// product grid theta_j = j / G (point-major, row-major per point).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pkam {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform product grid on T^q.
class GridShape {
 public:
  GridShape() = default;
  explicit GridShape(std::vector<int> dims);

  int rank() const { return static_cast<int>(dims_.size()); }
  int dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return size_; }

  /// Angle coordinates of a flat point index, each in [0, 1).
  Vec point(std::size_t flat) const;
  void point(std::size_t flat, std::span<double> out) const;

  bool operator==(const GridShape& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::size_t size_ = 0;
};

/// Smallest even grid with at least 2N+2 points per axis.
GridShape base_grid(std::span<const int> radius);

/// Grid padded to at least 3/2 of the base grid (even, >= 3N+2 per axis),
/// enough to remove quadratic aliasing from products of band-N fields.
GridShape padded_grid(std::span<const int> radius);

class GridField {
 public:
  GridField() = default;
  GridField(GridShape shape, int rows, int cols);

  const GridShape& shape() const { return shape_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t points() const { return shape_.size(); }

  Eigen::Map<RowMat> at(std::size_t p) {
    return {data_.data() + p * stride(), rows_, cols_};
  }
  Eigen::Map<const RowMat> at(std::size_t p) const {
    return {data_.data() + p * stride(), rows_, cols_};
  }
  double& operator()(std::size_t p, int r, int c) {
    return data_[p * stride() + static_cast<std::size_t>(r * cols_ + c)];
  }
  double operator()(std::size_t p, int r, int c) const {
    return data_[p * stride() + static_cast<std::size_t>(r * cols_ + c)];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Grid mean of each entry (trapezoid rule), summed in point order.
  Mat average() const;
  /// Largest pointwise max-row-sum norm.
  double sup_norm() const;
  /// Sub-block copy.
  GridField block(int r0, int c0, int nr, int nc) const;

 private:
  std::size_t stride() const { return static_cast<std::size_t>(rows_ * cols_); }

  GridShape shape_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Pointwise matrix product; throws ShapeMismatch.
GridField multiply(const GridField& a, const GridField& b);
GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);

class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(int rows, int cols, std::vector<int> radius);

  /// Forward transform of grid samples, truncated to `radius` and made
  /// exactly Hermitian. Grid dims must exceed 2N per axis.
  static FourierSeries from_grid(const GridField& field, std::vector<int> radius);

  /// Samples on `shape` (dims must exceed 2N per axis).
  GridField to_grid(const GridShape& shape) const;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int components() const { return rows_ * cols_; }
  int rank() const { return static_cast<int>(radius_.size()); }
  const std::vector<int>& radius() const { return radius_; }
  std::size_t mode_count() const { return modes_; }

  std::size_t mode_index(std::span<const int> k) const;
  std::vector<int> mode(std::size_t index) const;
  bool in_band(std::span<const int> k) const;

  Complex& coeff(int component, std::span<const int> k) {
    return coeffs_[static_cast<std::size_t>(component) * modes_ + mode_index(k)];
  }
  Complex coeff(int component, std::span<const int> k) const {
    return coeffs_[static_cast<std::size_t>(component) * modes_ + mode_index(k)];
  }
  Complex& coeff(int component, std::size_t index) {
    return coeffs_[static_cast<std::size_t>(component) * modes_ + index];
  }
  Complex coeff(int component, std::size_t index) const {
    return coeffs_[static_cast<std::size_t>(component) * modes_ + index];
  }
  std::size_t zero_index() const { return zero_index_; }

  std::span<Complex> component_span(int component);
  std::span<const Complex> component_span(int component) const;

  /// Coefficients multiplied by exp(2 pi i k.omega), i.e. theta -> u(theta + omega).
  FourierSeries shifted(std::span<const double> omega) const;
  /// Partial derivative along `axis`: coefficients times 2 pi i k_axis.
  FourierSeries derivative(int axis) const;
  /// Zero-padded or truncated copy.
  FourierSeries resized(std::vector<int> radius) const;
  /// Sub-matrix field.
  FourierSeries block(int r0, int c0, int nr, int nc) const;
  void set_block(int r0, int c0, const FourierSeries& b);

  /// The k = 0 coefficients as a real matrix.
  Mat average() const;
  void set_average(const Mat& value);

  /// Weighted l1 norm sum_k |c_k| exp(2 pi rho |k|_1), combined across the
  /// matrix by the max-row-sum rule. An upper bound of the sup norm over
  /// the complex strip of width rho. Throws NormOverflow.
  double analytic_norm(double rho) const;

  /// Max |c_{-k} - conj(c_k)| over all modes and components.
  double hermitian_defect() const;
  void symmetrize();

  /// Direct summation at a point; returns a rows x cols matrix.
  Mat evaluate(std::span<const double> theta) const;

  /// Energy of modes with |k_axis| > 3N/4 over total energy of nonconstant
  /// modes (0 when the series is constant).
  double tail_energy_ratio(int axis) const;

  FourierSeries& operator+=(const FourierSeries& other);
  FourierSeries& operator-=(const FourierSeries& other);
  FourierSeries& operator*=(double s);
  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(double s, FourierSeries a) { return a *= s; }

 private:
  void check_compatible(const FourierSeries& other) const;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> radius_;
  std::vector<std::size_t> strides_;
  std::size_t modes_ = 0;
  std::size_t zero_index_ = 0;
  std::vector<Complex> coeffs_;
};

/// Pointwise matrix product a*b evaluated on the padded grid of the
/// widest operand and truncated to `radius`.
FourierSeries grid_product(const FourierSeries& a, const FourierSeries& b,
                           std::vector<int> radius);

/// Pointwise product of a sampled field and a series, evaluated on the
/// field's grid and truncated to `radius`.
FourierSeries grid_product(const GridField& a, const FourierSeries& b, std::vector<int> radius);

/// Embedding K(theta) = W theta + u(theta) of T^{d+n} into T^d x R^d x T^n.
/// W is the fixed integer winding (identity onto the x and z angles, zero
/// on y by default); u is a truncated Fourier series.
class TorusEmbedding {
 public:
  TorusEmbedding() = default;
  TorusEmbedding(int d, int n, FourierSeries periodic, double rho = 0.0);

  /// K(theta) = (theta_x, y0, theta_z) with the given truncation.
  static TorusEmbedding flat(int d, int n, std::vector<int> radius, const Vec& y0,
                             double rho = 0.0);

  int d() const { return d_; }
  int n() const { return n_; }
  int phase_dim() const { return 2 * d_ + n_; }
  int torus_dim() const { return d_ + n_; }
  double rho() const { return rho_; }
  void set_rho(double rho) { rho_ = rho; }
  const std::vector<int>& radius() const { return periodic_.radius(); }

  const FourierSeries& periodic() const { return periodic_; }
  FourierSeries& periodic() { return periodic_; }
  const Mat& winding() const { return winding_; }
  void set_winding(Mat winding);

  Vec evaluate(std::span<const double> theta) const;

  /// theta -> K(theta + omega); the constant term absorbs W omega.
  TorusEmbedding shifted(std::span<const double> omega) const;

  GridField values(const GridShape& shape) const;
  /// DK on the grid, (2d+n) x (d+n).
  GridField jacobian(const GridShape& shape) const;
  /// One column of DK on the grid.
  GridField differentiate(int axis, const GridShape& shape) const;

  /// Weighted-l1 norm of the periodic part (winding excluded).
  double analytic_norm(double rho) const { return periodic_.analytic_norm(rho); }

  TorusEmbedding with_radius(std::vector<int> radius) const;

 private:
  int d_ = 0;
  int n_ = 0;
  double rho_ = 0.0;
  Mat winding_;
  FourierSeries periodic_;
};

/// Default winding: identity onto the angle rows, zero on the action rows.
Mat angle_identity_winding(int d, int n);

}  // namespace pkam
