#pragma once

#include <stdexcept>
#include <string>

namespace toruslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionError : public Error { using Error::Error; };
class MetricError : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };
class DegeneracyError : public Error { using Error::Error; };
class ConsistencyError : public Error { using Error::Error; };
class WindowError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ExtractionError : public Error { using Error::Error; };
class RecoveryError : public Error { using Error::Error; };
class ConnectivityError : public Error { using Error::Error; };
class CorrespondenceError : public Error { using Error::Error; };
class TopologyError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace toruslab
