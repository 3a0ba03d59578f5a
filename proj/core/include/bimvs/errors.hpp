#pragma once

#include <stdexcept>
#include <string>

namespace bimvs {

// Base class for all data/domain errors raised by the library.
// Usage errors (bad CLI flags etc.) are handled by the CLI layer.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BehindCamera : Error {
  BehindCamera() : Error("point lies behind the camera") {}
};
struct NonPositiveDepth : Error {
  NonPositiveDepth() : Error("depth must be positive") {}
};
struct DimensionMismatch : Error {
  using Error::Error;
  DimensionMismatch() : Error("grid dimensions do not match") {}
};
struct ImageTooSmall : Error {
  using Error::Error;
  ImageTooSmall() : Error("image is too small for this operation") {}
};
struct NoSources : Error {
  NoSources() : Error("at least one source view is required") {}
};
struct NonPositiveTau : Error {
  NonPositiveTau() : Error("tau must be positive") {}
};
struct NonPositiveBeta : Error {
  NonPositiveBeta() : Error("beta must be positive") {}
};
struct TooFewViews : Error {
  using Error::Error;
  TooFewViews() : Error("not enough views for fusion") {}
};
struct EmptyCloud : Error {
  EmptyCloud() : Error("point cloud is empty") {}
};
struct NoValidPixels : Error {
  NoValidPixels() : Error("no valid pixels") {}
};
struct DivergedLoss : Error {
  DivergedLoss() : Error("total loss became non-finite") {}
};
struct InvalidSpec : Error {
  using Error::Error;
};
struct InvalidParameter : Error {
  using Error::Error;
};
struct MalformedHeader : Error {
  using Error::Error;
};
struct UnexpectedEof : Error {
  UnexpectedEof() : Error("unexpected end of file") {}
};
struct MalformedCamFile : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace bimvs
