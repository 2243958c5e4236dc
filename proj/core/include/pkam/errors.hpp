#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pkam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NormOverflow : public Error {
 public:
  using Error::Error;
};

/// The right-hand side of a difference equation has a non-negligible average.
class NonzeroAverage : public Error {
 public:
  explicit NonzeroAverage(double magnitude)
      : Error("difference equation right-hand side has nonzero average " +
              std::to_string(magnitude)),
        magnitude_(magnitude) {}
  double magnitude() const { return magnitude_; }

 private:
  double magnitude_;
};

/// A Fourier mode whose divisor 1 - exp(2 pi i k.omega) is below the floor.
class ResonantMode : public Error {
 public:
  ResonantMode(std::vector<int> mode, double divisor);
  const std::vector<int>& mode() const { return mode_; }
  double divisor() const { return divisor_; }

 private:
  std::vector<int> mode_;
  double divisor_;
};

/// A pointwise inverse in the reducing frame failed.
class DegenerateTorus : public Error {
 public:
  DegenerateTorus(std::vector<double> theta, std::string condition, double cond_number);
  const std::vector<double>& theta() const { return theta_; }
  const std::string& condition() const { return condition_; }
  double condition_number() const { return cond_number_; }

 private:
  std::vector<double> theta_;
  std::string condition_;
  double cond_number_;
};

class RankDeficient : public Error {
 public:
  RankDeficient(int observed, int required)
      : Error("parameter response matrix has rank " + std::to_string(observed) + ", need " +
              std::to_string(required)),
        observed_(observed),
        required_(required) {}
  int observed_rank() const { return observed_; }
  int required_rank() const { return required_; }

 private:
  int observed_;
  int required_;
};

class DomainEscape : public Error {
 public:
  using Error::Error;
};

class StepRejected : public Error {
 public:
  using Error::Error;
};

class NotAligned : public Error {
 public:
  explicit NotAligned(double best_residual)
      : Error("tori could not be phase-aligned, best residual " + std::to_string(best_residual)),
        best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class SingularResponse : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string key, const std::string& what)
      : Error("schema error at '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pkam
