#pragma once

#include <stdexcept>
#include <string>

namespace elasso {

// All library failures derive from Error so callers can distinguish
// numeric problems from configuration problems in one catch.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SingularCovariance : public Error {
 public:
  explicit SingularCovariance(const std::string& what) : Error(what) {}
};

class NotSymmetric : public Error {
 public:
  explicit NotSymmetric(const std::string& what) : Error(what) {}
};

class NegativeTuning : public Error {
 public:
  explicit NegativeTuning(const std::string& what) : Error(what) {}
};

class DimensionExceedsSample : public Error {
 public:
  explicit DimensionExceedsSample(const std::string& what) : Error(what) {}
};

class DimensionTooSmall : public Error {
 public:
  explicit DimensionTooSmall(const std::string& what) : Error(what) {}
};

class DimensionTooLarge : public Error {
 public:
  explicit DimensionTooLarge(const std::string& what) : Error(what) {}
};

class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};

class NonpositiveEigenvalue : public Error {
 public:
  explicit NonpositiveEigenvalue(const std::string& what) : Error(what) {}
};

class InvalidProbability : public Error {
 public:
  explicit InvalidProbability(const std::string& what) : Error(what) {}
};

class BadGrouping : public Error {
 public:
  explicit BadGrouping(const std::string& what) : Error(what) {}
};

class NonpositiveDenominator : public Error {
 public:
  explicit NonpositiveDenominator(const std::string& what) : Error(what) {}
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

class FoldTooSmall : public Error {
 public:
  explicit FoldTooSmall(const std::string& what) : Error(what) {}
};

class InfeasibleConstraint : public Error {
 public:
  explicit InfeasibleConstraint(const std::string& what) : Error(what) {}
};

class SingularBlock : public Error {
 public:
  explicit SingularBlock(const std::string& what) : Error(what) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

class BadInput : public Error {
 public:
  explicit BadInput(const std::string& what) : Error(what) {}
};

}  // namespace elasso
