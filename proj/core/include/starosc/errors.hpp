#pragma once

#include <stdexcept>
#include <string>

namespace starosc {

// All solver failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class EosError : public Error {
public:
  explicit EosError(const std::string& msg) : Error(msg) {}
};

// No zero of u(r) found before r_max during the shooting integration.
class NoFiniteRadius : public Error {
public:
  explicit NoFiniteRadius(const std::string& msg) : Error(msg) {}
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

class SurfaceFitError : public Error {
public:
  explicit SurfaceFitError(const std::string& msg) : Error(msg) {}
};

class LambdaTooLarge : public Error {
public:
  explicit LambdaTooLarge(const std::string& msg) : Error(msg) {}
};

class MuTooLarge : public Error {
public:
  explicit MuTooLarge(const std::string& msg) : Error(msg) {}
};

class GravityCouplingTooStrong : public Error {
public:
  explicit GravityCouplingTooStrong(const std::string& msg) : Error(msg) {}
};

class TransformError : public Error {
public:
  explicit TransformError(const std::string& msg) : Error(msg) {}
};

class FormulationMismatch : public Error {
public:
  explicit FormulationMismatch(const std::string& msg) : Error(msg) {}
};

class GModeAssumptionViolated : public Error {
public:
  explicit GModeAssumptionViolated(const std::string& msg) : Error(msg) {}
};

class NoRootInWindow : public Error {
public:
  explicit NoRootInWindow(const std::string& msg) : Error(msg) {}
};

class NuNotRational : public Error {
public:
  explicit NuNotRational(const std::string& msg) : Error(msg) {}
};

class IntegratorError : public Error {
public:
  explicit IntegratorError(const std::string& msg) : Error(msg) {}
};

class ResolventNearPole : public Error {
public:
  explicit ResolventNearPole(const std::string& msg) : Error(msg) {}
};

}  // namespace starosc
