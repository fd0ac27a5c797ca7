#pragma once

#include <stdexcept>
#include <string>

namespace evir {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct InvalidInterval : Error {
    using Error::Error;
};

struct TooFewKnots : Error {
    using Error::Error;
};

struct OrderExceedsDegree : Error {
    using Error::Error;
};

struct InvalidTau : Error {
    using Error::Error;
};

struct NoExceedances : Error {
    using Error::Error;
};

struct FirstCoordinateNotPositive : Error {
    using Error::Error;
};

struct LineSearchFailed : Error {
    using Error::Error;
};

struct DidNotConverge : Error {
    using Error::Error;
};

struct KOutOfRange : Error {
    using Error::Error;
};

struct TooFewExceedances : Error {
    using Error::Error;
};

struct AllCellsFailed : Error {
    using Error::Error;
};

struct InvalidLevels : Error {
    using Error::Error;
};

struct WrongDimension : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

}  // namespace evir
