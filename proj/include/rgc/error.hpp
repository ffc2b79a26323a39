#pragma once

#include <stdexcept>
#include <string>

namespace rgc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong dimension, non-positive scale, point off the manifold.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Radius or configuration outside the range where the geometry is valid.
class OutOfRegime : public Error {
 public:
  using Error::Error;
};

/// Antipodal points on the sphere or an exact half-period tie on the torus.
class DegenerateGeodesic : public Error {
 public:
  using Error::Error;
};

/// Simplex list that is not closed under taking faces.
class InvalidComplex : public Error {
 public:
  using Error::Error;
};

class InsufficientDimension : public Error {
 public:
  using Error::Error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

}  // namespace rgc
