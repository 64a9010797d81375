#include "costas/poly.hpp"

#include <algorithm>

#include "costas/error.hpp"

namespace costas::poly {

std::vector<double> add(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  std::vector<double> r(n, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) r[n - p.size() + k] += p[k];
  for (std::size_t k = 0; k < q.size(); ++k) r[n - q.size() + k] += q[k];
  return r;
}

std::vector<double> multiply(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.empty() || q.empty()) return {};
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<double> scale(const std::vector<double>& p, double k) {
  std::vector<double> r(p);
  for (double& v : r) v *= k;
  return r;
}

std::vector<double> trim(const std::vector<double>& p) {
  std::size_t first = 0;
  while (first + 1 < p.size() && p[first] == 0.0) ++first;
  return {p.begin() + static_cast<std::ptrdiff_t>(first), p.end()};
}

std::complex<double> evaluate(const std::vector<double>& p, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (double coef : p) acc = acc * s + coef;
  return acc;
}

std::vector<double> characteristic(const Eigen::MatrixXd& m) {
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
  const Eigen::Index n = m.rows();
  std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
  coeffs[0] = 1.0;
  Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk + coeffs[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
    coeffs[static_cast<std::size_t>(k)] = -(m * mk).trace() / static_cast<double>(k);
  }
  return coeffs;
}

std::vector<std::complex<double>> roots(const std::vector<double>& p) {
  if (p.empty() || p.front() == 0.0) {
    throw InvalidArgument("polynomial has a zero leading coefficient");
  }
  const std::size_t degree = p.size() - 1;
  if (degree == 0) throw InvalidArgument("constant polynomial has no roots");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree),
                                                    static_cast<Eigen::Index>(degree));
  for (std::size_t k = 0; k < degree; ++k) {
    companion(0, static_cast<Eigen::Index>(k)) = -p[k + 1] / p[0];
  }
  for (std::size_t k = 1; k < degree; ++k) {
    companion(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<std::complex<double>> r(degree);
  for (std::size_t k = 0; k < degree; ++k) r[k] = es.eigenvalues()(static_cast<Eigen::Index>(k));
  return r;
}

}  // namespace costas::poly
