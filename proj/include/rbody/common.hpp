#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rbody {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

enum class ErrorKind { Config, Domain, Numerical, Verification, Dependency };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& s) { return Error(ErrorKind::Config, s); }
inline Error domain_error(const std::string& s) { return Error(ErrorKind::Domain, s); }
inline Error numerical_error(const std::string& s) { return Error(ErrorKind::Numerical, s); }
inline Error verification_error(const std::string& s) { return Error(ErrorKind::Verification, s); }
inline Error dependency_error(const std::string& s) { return Error(ErrorKind::Dependency, s); }

}  // namespace rbody
