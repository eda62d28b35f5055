#ifndef COOPSYNC_ERRORS_HPP
#define COOPSYNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coopsync {

/// Input vectors/matrices have inconsistent or unusable sizes.
struct InvalidDimensions : std::invalid_argument {
    explicit InvalidDimensions(const std::string& what) : std::invalid_argument(what) {}
};

/// A scalar argument is outside its documented domain.
struct InvalidParameter : std::invalid_argument {
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// A covariance input is not positive semidefinite.
struct InvalidCovariance : std::invalid_argument {
    explicit InvalidCovariance(const std::string& what) : std::invalid_argument(what) {}
};

/// The training design matrix is rank deficient.
struct SingularDesign : std::runtime_error {
    explicit SingularDesign(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that must be inverted is singular or too ill-conditioned to trust.
struct NumericalDegeneracy : std::runtime_error {
    explicit NumericalDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

/// A random draw was requested from a distribution that only exists as a limit.
struct UnsupportedDraw : std::runtime_error {
    explicit UnsupportedDraw(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace coopsync

#endif  // COOPSYNC_ERRORS_HPP
