#pragma once

#include <stdexcept>
#include <string>

namespace sheafss {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SHEAFSS_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

// exactla
SHEAFSS_DEFINE_ERROR(NoSolution)
SHEAFSS_DEFINE_ERROR(ContainmentViolation)
SHEAFSS_DEFINE_ERROR(DimensionMismatch)
SHEAFSS_DEFINE_ERROR(FieldMismatch)
SHEAFSS_DEFINE_ERROR(InvalidField)
SHEAFSS_DEFINE_ERROR(ParseError)

// poset
SHEAFSS_DEFINE_ERROR(UnknownElement)
SHEAFSS_DEFINE_ERROR(InvalidPoset)
SHEAFSS_DEFINE_ERROR(NotMonotone)

// sheafcat
SHEAFSS_DEFINE_ERROR(InvalidSheaf)
SHEAFSS_DEFINE_ERROR(IllFormedMorphism)
SHEAFSS_DEFINE_ERROR(NotOpen)
SHEAFSS_DEFINE_ERROR(NotMono)
SHEAFSS_DEFINE_ERROR(NotCoinduced)
SHEAFSS_DEFINE_ERROR(TruncationInsufficient)

// homalg
SHEAFSS_DEFINE_ERROR(InvalidComplex)
SHEAFSS_DEFINE_ERROR(ZigzagFailure)
SHEAFSS_DEFINE_ERROR(ExtensionFailure)

// ceres
SHEAFSS_DEFINE_ERROR(InternalExactnessFailure)
SHEAFSS_DEFINE_ERROR(InternalCommutativityFailure)

// specseq
SHEAFSS_DEFINE_ERROR(SquareNotCommuting)
SHEAFSS_DEFINE_ERROR(NotACoupleMorphism)
SHEAFSS_DEFINE_ERROR(ExactnessLost)

// gross
SHEAFSS_DEFINE_ERROR(AcyclicityViolation)
SHEAFSS_DEFINE_ERROR(PreconditionFailed)

// instance files
SHEAFSS_DEFINE_ERROR(DanglingReference)

#undef SHEAFSS_DEFINE_ERROR

}  // namespace sheafss
