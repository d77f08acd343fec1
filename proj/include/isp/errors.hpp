#pragma once

#include <stdexcept>
#include <string>

namespace isp {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad sizes, non-positive beta, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A complex shift d collides with an eigenvalue of -Delta_h.
class SingularShift : public Error {
public:
    using Error::Error;
};

/// Synthetic division by (mu - 1) left a non-negligible remainder.
class DeflationFailure : public Error {
public:
    using Error::Error;
};

/// The simultaneous root iteration did not converge.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Eigen-parameters are not pairwise distinct to working precision.
class NearDefectiveMatrix : public Error {
public:
    using Error::Error;
};

/// The reconstructed source carries a non-negligible imaginary part.
class NonRealReconstruction : public Error {
public:
    using Error::Error;
};

/// Sparse LU factorization failed.
class SingularFactorization : public Error {
public:
    using Error::Error;
};

}  // namespace isp
