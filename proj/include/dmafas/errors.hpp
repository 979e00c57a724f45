#pragma once

#include <stdexcept>
#include <string>

namespace dmafas {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed designs, configs, files, dimension mismatches.
class InputError : public Error {
public:
  using Error::Error;
};

/// Failures of the numerical model itself (singular systems, resonances...).
class NumericalError : public Error {
public:
  using Error::Error;
};

#define DMAFAS_DEFINE_ERROR(Name, Base)                                        \
  class Name : public Base {                                                   \
  public:                                                                      \
    using Base::Base;                                                          \
  }

DMAFAS_DEFINE_ERROR(InvalidDesign, InputError);
DMAFAS_DEFINE_ERROR(OutOfWaveguide, InputError);
DMAFAS_DEFINE_ERROR(DimensionMismatch, InputError);
DMAFAS_DEFINE_ERROR(AllSlotsOff, InputError);
DMAFAS_DEFINE_ERROR(EmptyCodebook, InputError);
DMAFAS_DEFINE_ERROR(NoInterferers, InputError);
DMAFAS_DEFINE_ERROR(NonPhysicalReference, InputError);
DMAFAS_DEFINE_ERROR(ConfigError, InputError);

DMAFAS_DEFINE_ERROR(CutoffError, NumericalError);
DMAFAS_DEFINE_ERROR(ResonanceError, NumericalError);
DMAFAS_DEFINE_ERROR(CoincidentPoints, NumericalError);
DMAFAS_DEFINE_ERROR(SingularSolve, NumericalError);
DMAFAS_DEFINE_ERROR(ZeroRadiatedPower, NumericalError);
DMAFAS_DEFINE_ERROR(NotPSD, NumericalError);
DMAFAS_DEFINE_ERROR(QuadratureNotConverged, NumericalError);
DMAFAS_DEFINE_ERROR(ZeroDiagonal, NumericalError);
DMAFAS_DEFINE_ERROR(OptimizerStalled, NumericalError);

#undef DMAFAS_DEFINE_ERROR

} // namespace dmafas
