#include "pkam/fourier.hpp"

#include "fft.hpp"
#include "pkam/errors.hpp"
#include "pkam/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// exp(x) overflows double for x above ~709.78.
constexpr double kMaxExponent = 709.0;

int even_at_least(int value) { return value % 2 == 0 ? value : value + 1; }

// Flat grid position of every coefficient mode (modes wrap modulo G).
std::vector<std::size_t> mode_to_grid(const FourierSeries& s, const GridShape& shape) {
  const int q = s.rank();
  if (shape.rank() != q) throw ShapeMismatch("grid rank does not match series rank");
  for (int a = 0; a < q; ++a) {
    if (shape.dim(a) < 2 * s.radius()[static_cast<std::size_t>(a)] + 1) {
      throw ShapeMismatch("grid too coarse for truncation on axis " + std::to_string(a));
    }
  }
  std::vector<std::size_t> gstride(static_cast<std::size_t>(q), 1);
  for (int a = q - 2; a >= 0; --a) {
    gstride[static_cast<std::size_t>(a)] =
        gstride[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(shape.dim(a + 1));
  }
  std::vector<std::size_t> map(s.mode_count());
  for (std::size_t idx = 0; idx < s.mode_count(); ++idx) {
    const auto k = s.mode(idx);
    std::size_t pos = 0;
    for (int a = 0; a < q; ++a) {
      const int g = shape.dim(a);
      const int wrapped = ((k[static_cast<std::size_t>(a)] % g) + g) % g;
      pos += static_cast<std::size_t>(wrapped) * gstride[static_cast<std::size_t>(a)];
    }
    map[idx] = pos;
  }
  return map;
}

// Per-axis tables of exp(2 pi i k x_a) for k in [-N_a, N_a].
std::vector<std::vector<Complex>> axis_phases(const std::vector<int>& radius,
                                              std::span<const double> x) {
  std::vector<std::vector<Complex>> table(radius.size());
  for (std::size_t a = 0; a < radius.size(); ++a) {
    const int n = radius[a];
    table[a].resize(static_cast<std::size_t>(2 * n + 1));
    for (int k = -n; k <= n; ++k) {
      table[a][static_cast<std::size_t>(k + n)] = std::polar(1.0, kTwoPi * k * x[a]);
    }
  }
  return table;
}

}  // namespace

// ---------------------------------------------------------------- GridShape

GridShape::GridShape(std::vector<int> dims) : dims_(std::move(dims)) {
  size_ = 1;
  for (int g : dims_) {
    if (g <= 0) throw ShapeMismatch("grid dimensions must be positive");
    size_ *= static_cast<std::size_t>(g);
  }
}

void GridShape::point(std::size_t flat, std::span<double> out) const {
  for (int a = rank() - 1; a >= 0; --a) {
    const auto g = static_cast<std::size_t>(dims_[static_cast<std::size_t>(a)]);
    out[static_cast<std::size_t>(a)] = static_cast<double>(flat % g) / static_cast<double>(g);
    flat /= g;
  }
}

Vec GridShape::point(std::size_t flat) const {
  Vec theta(rank());
  point(flat, std::span<double>(theta.data(), static_cast<std::size_t>(rank())));
  return theta;
}

GridShape base_grid(std::span<const int> radius) {
  std::vector<int> dims;
  for (int n : radius) dims.push_back(even_at_least(2 * n + 2));
  return GridShape(std::move(dims));
}

GridShape padded_grid(std::span<const int> radius) {
  std::vector<int> dims;
  for (int n : radius) {
    const int base = even_at_least(2 * n + 2);
    dims.push_back(even_at_least(std::max(3 * n + 2, (3 * base + 1) / 2)));
  }
  return GridShape(std::move(dims));
}

// ---------------------------------------------------------------- GridField

GridField::GridField(GridShape shape, int rows, int cols)
    : shape_(std::move(shape)),
      rows_(rows),
      cols_(cols),
      data_(shape_.size() * static_cast<std::size_t>(rows * cols), 0.0) {}

Mat GridField::average() const {
  Mat sum = Mat::Zero(rows_, cols_);
  for (std::size_t p = 0; p < points(); ++p) sum += at(p);
  return sum / static_cast<double>(points());
}

double GridField::sup_norm() const {
  double best = 0.0;
  for (std::size_t p = 0; p < points(); ++p) {
    best = std::max(best, at(p).cwiseAbs().rowwise().sum().maxCoeff());
  }
  return best;
}

GridField GridField::block(int r0, int c0, int nr, int nc) const {
  if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_) {
    throw ShapeMismatch("grid block out of range");
  }
  GridField out(shape_, nr, nc);
  for (std::size_t p = 0; p < points(); ++p) out.at(p) = at(p).block(r0, c0, nr, nc);
  return out;
}

GridField multiply(const GridField& a, const GridField& b) {
  if (!(a.shape() == b.shape()) || a.cols() != b.rows()) {
    throw ShapeMismatch("incompatible operands in pointwise product");
  }
  GridField out(a.shape(), a.rows(), b.cols());
  parallel_for(a.points(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) out.at(p).noalias() = a.at(p) * b.at(p);
  });
  return out;
}

namespace {
GridField combine(const GridField& a, const GridField& b, double sign) {
  if (!(a.shape() == b.shape()) || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("incompatible operands in pointwise sum");
  }
  GridField out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += sign * src[i];
  return out;
}
}  // namespace

GridField operator+(const GridField& a, const GridField& b) { return combine(a, b, 1.0); }
GridField operator-(const GridField& a, const GridField& b) { return combine(a, b, -1.0); }

// ------------------------------------------------------------ FourierSeries

FourierSeries::FourierSeries(int rows, int cols, std::vector<int> radius)
    : rows_(rows), cols_(cols), radius_(std::move(radius)) {
  if (rows <= 0 || cols <= 0) throw ShapeMismatch("series needs a positive shape");
  const std::size_t q = radius_.size();
  strides_.assign(q, 1);
  modes_ = 1;
  for (std::size_t a = q; a-- > 0;) {
    if (radius_[a] < 0) throw ShapeMismatch("negative truncation radius");
    strides_[a] = modes_;
    modes_ *= static_cast<std::size_t>(2 * radius_[a] + 1);
  }
  zero_index_ = 0;
  for (std::size_t a = 0; a < q; ++a) {
    zero_index_ += static_cast<std::size_t>(radius_[a]) * strides_[a];
  }
  coeffs_.assign(modes_ * static_cast<std::size_t>(components()), Complex{});
}

std::size_t FourierSeries::mode_index(std::span<const int> k) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < radius_.size(); ++a) {
    idx += static_cast<std::size_t>(k[a] + radius_[a]) * strides_[a];
  }
  return idx;
}

std::vector<int> FourierSeries::mode(std::size_t index) const {
  std::vector<int> k(radius_.size());
  for (std::size_t a = 0; a < radius_.size(); ++a) {
    const auto extent = static_cast<std::size_t>(2 * radius_[a] + 1);
    k[a] = static_cast<int>((index / strides_[a]) % extent) - radius_[a];
  }
  return k;
}

bool FourierSeries::in_band(std::span<const int> k) const {
  if (k.size() != radius_.size()) return false;
  for (std::size_t a = 0; a < k.size(); ++a) {
    if (std::abs(k[a]) > radius_[a]) return false;
  }
  return true;
}

std::span<Complex> FourierSeries::component_span(int component) {
  return {coeffs_.data() + static_cast<std::size_t>(component) * modes_, modes_};
}

std::span<const Complex> FourierSeries::component_span(int component) const {
  return {coeffs_.data() + static_cast<std::size_t>(component) * modes_, modes_};
}

FourierSeries FourierSeries::from_grid(const GridField& field, std::vector<int> radius) {
  FourierSeries out(field.rows(), field.cols(), std::move(radius));
  const auto& shape = field.shape();
  const auto map = mode_to_grid(out, shape);
  for (int a = 0; a < shape.rank(); ++a) {
    if (shape.dim(a) <= 2 * out.radius()[static_cast<std::size_t>(a)]) {
      throw ShapeMismatch("grid cannot resolve the requested truncation");
    }
  }
  const std::size_t npts = shape.size();
  const double scale = 1.0 / static_cast<double>(npts);
  const int comps = out.components();
  std::vector<Complex> buffer(npts);
  auto src = field.data();
  for (int c = 0; c < comps; ++c) {
    for (std::size_t p = 0; p < npts; ++p) {
      buffer[p] = Complex(src[p * static_cast<std::size_t>(comps) + static_cast<std::size_t>(c)],
                          0.0);
    }
    detail::fft(buffer, shape.dims(), detail::FftDirection::forward);
    auto dst = out.component_span(c);
    for (std::size_t idx = 0; idx < out.modes_; ++idx) dst[idx] = buffer[map[idx]] * scale;
  }
  out.symmetrize();
  return out;
}

GridField FourierSeries::to_grid(const GridShape& shape) const {
  GridField out(shape, rows_, cols_);
  const auto map = mode_to_grid(*this, shape);
  const std::size_t npts = shape.size();
  const int comps = components();
  std::vector<Complex> buffer(npts);
  auto dst = out.data();
  for (int c = 0; c < comps; ++c) {
    std::fill(buffer.begin(), buffer.end(), Complex{});
    auto src = component_span(c);
    for (std::size_t idx = 0; idx < modes_; ++idx) buffer[map[idx]] = src[idx];
    detail::fft(buffer, shape.dims(), detail::FftDirection::backward);
    for (std::size_t p = 0; p < npts; ++p) {
      dst[p * static_cast<std::size_t>(comps) + static_cast<std::size_t>(c)] = buffer[p].real();
    }
  }
  return out;
}

FourierSeries FourierSeries::shifted(std::span<const double> omega) const {
  if (omega.size() != radius_.size()) throw ShapeMismatch("shift vector has wrong dimension");
  FourierSeries out = *this;
  const auto table = axis_phases(radius_, omega);
  std::vector<Complex> phase(modes_);
  for (std::size_t idx = 0; idx < modes_; ++idx) {
    Complex ph{1.0, 0.0};
    for (std::size_t a = 0; a < radius_.size(); ++a) {
      const auto extent = static_cast<std::size_t>(2 * radius_[a] + 1);
      ph *= table[a][(idx / strides_[a]) % extent];
    }
    phase[idx] = ph;
  }
  for (int c = 0; c < components(); ++c) {
    auto dst = out.component_span(c);
    for (std::size_t idx = 0; idx < modes_; ++idx) dst[idx] *= phase[idx];
  }
  return out;
}

FourierSeries FourierSeries::derivative(int axis) const {
  if (axis < 0 || axis >= rank()) throw ShapeMismatch("derivative axis out of range");
  FourierSeries out = *this;
  const auto a = static_cast<std::size_t>(axis);
  const auto extent = static_cast<std::size_t>(2 * radius_[a] + 1);
  for (int c = 0; c < components(); ++c) {
    auto dst = out.component_span(c);
    for (std::size_t idx = 0; idx < modes_; ++idx) {
      const int k = static_cast<int>((idx / strides_[a]) % extent) - radius_[a];
      dst[idx] *= Complex(0.0, kTwoPi * k);
    }
  }
  return out;
}

FourierSeries FourierSeries::resized(std::vector<int> radius) const {
  if (radius.size() != radius_.size()) throw ShapeMismatch("resize changes the torus rank");
  FourierSeries out(rows_, cols_, std::move(radius));
  for (std::size_t idx = 0; idx < modes_; ++idx) {
    const auto k = mode(idx);
    if (!out.in_band(k)) continue;
    const std::size_t j = out.mode_index(k);
    for (int c = 0; c < components(); ++c) out.coeff(c, j) = coeff(c, idx);
  }
  return out;
}

FourierSeries FourierSeries::block(int r0, int c0, int nr, int nc) const {
  if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_) {
    throw ShapeMismatch("series block out of range");
  }
  FourierSeries out(nr, nc, radius_);
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      auto src = component_span((r0 + r) * cols_ + c0 + c);
      auto dst = out.component_span(r * nc + c);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  return out;
}

void FourierSeries::set_block(int r0, int c0, const FourierSeries& b) {
  if (b.radius_ != radius_ || r0 < 0 || c0 < 0 || r0 + b.rows_ > rows_ ||
      c0 + b.cols_ > cols_) {
    throw ShapeMismatch("series block does not fit");
  }
  for (int r = 0; r < b.rows_; ++r) {
    for (int c = 0; c < b.cols_; ++c) {
      auto src = b.component_span(r * b.cols_ + c);
      auto dst = component_span((r0 + r) * cols_ + c0 + c);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
}

Mat FourierSeries::average() const {
  Mat out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out(r, c) = coeff(r * cols_ + c, zero_index_).real();
  }
  return out;
}

void FourierSeries::set_average(const Mat& value) {
  if (value.rows() != rows_ || value.cols() != cols_) throw ShapeMismatch("average shape");
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) coeff(r * cols_ + c, zero_index_) = value(r, c);
  }
}

double FourierSeries::analytic_norm(double rho) const {
  if (rho < 0.0) throw std::invalid_argument("analytic norm needs rho >= 0");
  std::vector<double> weight(modes_, 1.0);
  if (rho > 0.0) {
    for (std::size_t idx = 0; idx < modes_; ++idx) {
      int l1 = 0;
      for (int k : mode(idx)) l1 += std::abs(k);
      const double exponent = kTwoPi * rho * l1;
      if (exponent > kMaxExponent) {
        throw NormOverflow("analytic norm weight exp(" + std::to_string(exponent) +
                           ") is not representable");
      }
      weight[idx] = std::exp(exponent);
    }
  }
  double best = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double row = 0.0;
    for (int c = 0; c < cols_; ++c) {
      auto src = component_span(r * cols_ + c);
      for (std::size_t idx = 0; idx < modes_; ++idx) row += std::abs(src[idx]) * weight[idx];
    }
    best = std::max(best, row);
  }
  return best;
}

double FourierSeries::hermitian_defect() const {
  double worst = 0.0;
  for (int c = 0; c < components(); ++c) {
    auto src = component_span(c);
    for (std::size_t idx = 0; idx < modes_; ++idx) {
      worst = std::max(worst, std::abs(src[modes_ - 1 - idx] - std::conj(src[idx])));
    }
  }
  return worst;
}

void FourierSeries::symmetrize() {
  for (int c = 0; c < components(); ++c) {
    auto dst = component_span(c);
    // Reflection k -> -k maps flat index idx to modes_-1-idx.
    for (std::size_t idx = 0; idx <= zero_index_; ++idx) {
      const std::size_t mirror = modes_ - 1 - idx;
      const Complex avg = 0.5 * (dst[idx] + std::conj(dst[mirror]));
      dst[idx] = avg;
      dst[mirror] = std::conj(avg);
    }
    dst[zero_index_] = Complex(dst[zero_index_].real(), 0.0);
  }
}

Mat FourierSeries::evaluate(std::span<const double> theta) const {
  if (theta.size() != radius_.size()) throw ShapeMismatch("evaluation point has wrong dimension");
  const auto table = axis_phases(radius_, theta);
  std::vector<Complex> basis(modes_);
  for (std::size_t idx = 0; idx < modes_; ++idx) {
    Complex ph{1.0, 0.0};
    for (std::size_t a = 0; a < radius_.size(); ++a) {
      const auto extent = static_cast<std::size_t>(2 * radius_[a] + 1);
      ph *= table[a][(idx / strides_[a]) % extent];
    }
    basis[idx] = ph;
  }
  Mat out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      auto src = component_span(r * cols_ + c);
      double acc = 0.0;
      for (std::size_t idx = 0; idx < modes_; ++idx) {
        acc += src[idx].real() * basis[idx].real() - src[idx].imag() * basis[idx].imag();
      }
      out(r, c) = acc;
    }
  }
  return out;
}

double FourierSeries::tail_energy_ratio(int axis) const {
  const auto a = static_cast<std::size_t>(axis);
  const int cutoff = (3 * radius_[a]) / 4;
  const auto extent = static_cast<std::size_t>(2 * radius_[a] + 1);
  double tail = 0.0;
  double total = 0.0;
  for (int c = 0; c < components(); ++c) {
    auto src = component_span(c);
    for (std::size_t idx = 0; idx < modes_; ++idx) {
      if (idx == zero_index_) continue;
      const double e = std::norm(src[idx]);
      total += e;
      const int k = static_cast<int>((idx / strides_[a]) % extent) - radius_[a];
      if (std::abs(k) > cutoff) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

void FourierSeries::check_compatible(const FourierSeries& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || radius_ != other.radius_) {
    throw ShapeMismatch("incompatible Fourier series");
  }
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

FourierSeries& FourierSeries::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

// ----------------------------------------------------------- grid products

FourierSeries grid_product(const FourierSeries& a, const FourierSeries& b,
                           std::vector<int> radius) {
  if (a.rank() != b.rank() || a.cols() != b.rows()) {
    throw ShapeMismatch("incompatible operands in series product");
  }
  std::vector<int> widest(radius.size());
  for (std::size_t ax = 0; ax < radius.size(); ++ax) {
    widest[ax] = std::max({a.radius()[ax], b.radius()[ax], radius[ax]});
  }
  const GridShape grid = padded_grid(widest);
  return FourierSeries::from_grid(multiply(a.to_grid(grid), b.to_grid(grid)), std::move(radius));
}

FourierSeries grid_product(const GridField& a, const FourierSeries& b, std::vector<int> radius) {
  return FourierSeries::from_grid(multiply(a, b.to_grid(a.shape())), std::move(radius));
}

// ---------------------------------------------------------- TorusEmbedding

Mat angle_identity_winding(int d, int n) {
  Mat w = Mat::Zero(2 * d + n, d + n);
  for (int i = 0; i < d; ++i) w(i, i) = 1.0;
  for (int j = 0; j < n; ++j) w(2 * d + j, d + j) = 1.0;
  return w;
}

TorusEmbedding::TorusEmbedding(int d, int n, FourierSeries periodic, double rho)
    : d_(d), n_(n), rho_(rho), winding_(angle_identity_winding(d, n)),
      periodic_(std::move(periodic)) {
  if (d < 1 || n < 0) throw DimensionMismatch("torus needs d >= 1 and n >= 0");
  if (periodic_.rows() != 2 * d + n || periodic_.cols() != 1 || periodic_.rank() != d + n) {
    throw DimensionMismatch("periodic part must be a (2d+n)-vector field on T^(d+n)");
  }
}

TorusEmbedding TorusEmbedding::flat(int d, int n, std::vector<int> radius, const Vec& y0,
                                    double rho) {
  if (y0.size() != d) throw DimensionMismatch("flat torus needs d action values");
  FourierSeries u(2 * d + n, 1, std::move(radius));
  Mat avg = Mat::Zero(2 * d + n, 1);
  avg.block(d, 0, d, 1) = y0;
  u.set_average(avg);
  return TorusEmbedding(d, n, std::move(u), rho);
}

void TorusEmbedding::set_winding(Mat winding) {
  if (winding.rows() != phase_dim() || winding.cols() != torus_dim()) {
    throw DimensionMismatch("winding must be (2d+n) x (d+n)");
  }
  winding_ = std::move(winding);
}

Vec TorusEmbedding::evaluate(std::span<const double> theta) const {
  Eigen::Map<const Vec> th(theta.data(), static_cast<Eigen::Index>(theta.size()));
  return winding_ * th + periodic_.evaluate(theta).col(0);
}

TorusEmbedding TorusEmbedding::shifted(std::span<const double> omega) const {
  TorusEmbedding out = *this;
  out.periodic_ = periodic_.shifted(omega);
  Eigen::Map<const Vec> om(omega.data(), static_cast<Eigen::Index>(omega.size()));
  out.periodic_.set_average(out.periodic_.average() + winding_ * om);
  return out;
}

GridField TorusEmbedding::values(const GridShape& shape) const {
  GridField out = periodic_.to_grid(shape);
  parallel_for(out.points(), [&](std::size_t begin, std::size_t end) {
    Vec theta(torus_dim());
    for (std::size_t p = begin; p < end; ++p) {
      shape.point(p, std::span<double>(theta.data(), static_cast<std::size_t>(theta.size())));
      out.at(p) += winding_ * theta;
    }
  });
  return out;
}

GridField TorusEmbedding::differentiate(int axis, const GridShape& shape) const {
  GridField out = periodic_.derivative(axis).to_grid(shape);
  const Vec column = winding_.col(axis);
  for (std::size_t p = 0; p < out.points(); ++p) out.at(p) += column;
  return out;
}

GridField TorusEmbedding::jacobian(const GridShape& shape) const {
  GridField out(shape, phase_dim(), torus_dim());
  for (int a = 0; a < torus_dim(); ++a) {
    const GridField col = differentiate(a, shape);
    for (std::size_t p = 0; p < out.points(); ++p) out.at(p).col(a) = col.at(p);
  }
  return out;
}

TorusEmbedding TorusEmbedding::with_radius(std::vector<int> radius) const {
  TorusEmbedding out = *this;
  out.periodic_ = periodic_.resized(std::move(radius));
  return out;
}

}  // namespace pkam
