#pragma once

#include <stdexcept>
#include <string>

namespace slpr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneratePolygon : Error {
    using Error::Error;
};

struct InvalidRect : Error {
    using Error::Error;
};

struct EncodingFailure : Error {
    using Error::Error;
};

struct DegenerateRestoration : Error {
    using Error::Error;
};

struct FitFailure : Error {
    using Error::Error;
};

struct SizeMismatch : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct InvalidSpec : Error {
    using Error::Error;
};

struct NoIntersection : Error {
    using Error::Error;
};

}  // namespace slpr
