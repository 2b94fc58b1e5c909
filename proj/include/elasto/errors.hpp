#pragma once

#include <stdexcept>
#include <string>

namespace elasto {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  SingularMatrix(double determinant, double tol)
      : Error("singular matrix: |det| = " + std::to_string(determinant) +
              " <= tol = " + std::to_string(tol)),
        determinant_(determinant) {}
  double determinant() const { return determinant_; }

 private:
  double determinant_;
};

/// The flow map degenerated: min det(grad eta) fell to the threshold.
class InvertibilityLost : public Error {
 public:
  InvertibilityLost(double min_det, double threshold, double time = 0.0)
      : Error("flow map invertibility lost: min det = " + std::to_string(min_det) +
              " <= " + std::to_string(threshold)),
        min_det_(min_det),
        threshold_(threshold),
        time_(time) {}
  double min_det() const { return min_det_; }
  double threshold() const { return threshold_; }
  double time() const { return time_; }
  InvertibilityLost at(double t) const { return InvertibilityLost(min_det_, threshold_, t); }

 private:
  double min_det_;
  double threshold_;
  double time_;
};

class NonFinite : public Error {
 public:
  explicit NonFinite(double time)
      : Error("non-finite state at t = " + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(double residual, int iterations)
      : Error("flow map inversion did not converge: residual " + std::to_string(residual) +
              " after " + std::to_string(iterations) + " iterations"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace elasto
