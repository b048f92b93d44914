#pragma once

#include <stdexcept>
#include <string>

namespace sinkdiv {

// Base of every error raised by the library. Callers that only care about
// "something was wrong with the input" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NegativeWeight : public Error {
 public:
  using Error::Error;
};

class WeightSumDeviation : public Error {
 public:
  using Error::Error;
};

class PointOutsideBox : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SupportMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroMass : public Error {
 public:
  using Error::Error;
};

class NonDifferentiablePoint : public Error {
 public:
  using Error::Error;
};

class ZeroDiscrepancy : public Error {
 public:
  using Error::Error;
};

class SizeExceeded : public Error {
 public:
  using Error::Error;
};

class NotNegatedKernel : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sinkdiv
