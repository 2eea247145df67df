#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace capdrop {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };
class DegenerateProfile : public Error { public: using Error::Error; };
class RecentreDomainError : public Error { public: using Error::Error; };
class DegenerateFrame : public Error { public: using Error::Error; };
class ConditioningError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class StiffnessError : public Error { public: using Error::Error; };

// Non-convergence of the constrained minimizer; keeps the last iterate so
// callers can inspect or restart from it.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, std::vector<double> last_rho, double eps,
                       double residual)
        : Error(what), last_rho_(std::move(last_rho)), eps_(eps), residual_(residual) {}
    const std::vector<double>& last_iterate() const { return last_rho_; }
    double eps() const { return eps_; }
    double residual() const { return residual_; }

private:
    std::vector<double> last_rho_;
    double eps_;
    double residual_;
};

class ShootingFailure : public Error {
public:
    ShootingFailure(const std::string& what, std::vector<double> residual)
        : Error(what), residual_(std::move(residual)) {}
    const std::vector<double>& residual() const { return residual_; }

private:
    std::vector<double> residual_;
};

}  // namespace capdrop
