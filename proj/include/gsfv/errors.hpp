#pragma once

#include <stdexcept>
#include <string>

namespace gsfv {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSize : public Error {
 public:
  using Error::Error;
};

class NonSquareCells : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class MeshMismatch : public Error {
 public:
  MeshMismatch() : Error("fields live on different meshes") {}
};

/// Conjugate gradients hit its iteration cap.
class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual)
      : Error("CG did not converge after " + std::to_string(iterations) +
              " iterations (relative residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// A time step failed inside a run; carries the failing step index.
class StepFailure : public Error {
 public:
  StepFailure(long step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SampleTimeUnreachable : public Error {
 public:
  using Error::Error;
};

class UnresolvableInterface : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace gsfv
