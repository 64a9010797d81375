#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Small dense polynomial helpers. Coefficients are stored in descending powers
// of s: {a_n, ..., a_1, a_0}.
namespace costas::poly {

std::vector<double> add(const std::vector<double>& p, const std::vector<double>& q);
std::vector<double> multiply(const std::vector<double>& p, const std::vector<double>& q);
std::vector<double> scale(const std::vector<double>& p, double k);

/// Drops leading coefficients that are exactly zero (keeps at least one).
std::vector<double> trim(const std::vector<double>& p);

std::complex<double> evaluate(const std::vector<double>& p, std::complex<double> s);

/// det(sI - M) via Faddeev-LeVerrier; monic, degree = rows(M).
std::vector<double> characteristic(const Eigen::MatrixXd& m);

/// Roots as eigenvalues of the companion matrix. Throws InvalidArgument for a
/// zero leading coefficient or a constant polynomial.
std::vector<std::complex<double>> roots(const std::vector<double>& p);

}  // namespace costas::poly
