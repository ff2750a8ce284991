#include "trisolve/polynomial.hpp"

#include "trisolve/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace trisolve {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0)
    coeffs_.pop_back();
}

int Polynomial::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

int Polynomial::lowest_degree() const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0.0)
      return static_cast<int>(i);
  return -1;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * x + *it;
  return acc;
}

double Polynomial::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size()))
    return 0.0;
  return coeffs_[static_cast<std::size_t>(i)];
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1)
    return Polynomial{};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  if (coeffs_.empty())
    return Polynomial{};
  std::vector<double> a(coeffs_.size() + 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(a));
}

Polynomial Polynomial::scaled(double t) const {
  std::vector<double> c = coeffs_;
  for (double& v : c)
    v *= t;
  return Polynomial(std::move(c));
}

namespace {

// Parlett-Reinsch balancing of a dense matrix in place.
void balance(Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i)
          continue;
        row += std::abs(m(i, j));
        col += std::abs(m(j, i));
      }
      if (row == 0.0 || col == 0.0)
        continue;
      int exponent = 0;
      std::frexp(row / col, &exponent);
      exponent /= 2;
      if (exponent == 0)
        continue;
      const double scale = std::ldexp(1.0, exponent);
      if ((row / scale + col * scale) < 0.9 * (row + col)) {
        m.row(i) /= scale;
        m.col(i) *= scale;
        changed = true;
      }
    }
  }
}

double polish(const Polynomial& p, const Polynomial& dp, double x) {
  for (int it = 0; it < 50; ++it) {
    const double fx = p(x);
    const double dfx = dp(x);
    if (fx == 0.0 || dfx == 0.0)
      break;
    const double step = fx / dfx;
    const double next = x - step;
    if (!std::isfinite(next))
      break;
    // keep the Newton update only while it improves the residual
    if (std::abs(p(next)) >= std::abs(fx))
      break;
    x = next;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x)))
      break;
  }
  return x;
}

} // namespace

std::vector<double> Polynomial::real_roots() const {
  std::vector<double> roots;
  if (is_zero())
    throw NumericError("real_roots: zero polynomial has no isolated roots");
  const int low = lowest_degree();
  const int deg = degree();
  if (low > 0)
    roots.push_back(0.0);

  // reduced polynomial q(x) = p(x) / x^low with q(0) != 0
  const int n = deg - low;
  if (n >= 1) {
    std::vector<double> q(coeffs_.begin() + low, coeffs_.end());
    const Polynomial reduced(q);
    const Polynomial dreduced = reduced.derivative();
    const double lead = q.back();

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
      companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i)
      companion(i, n - 1) = -q[static_cast<std::size_t>(i)] / lead;
    balance(companion);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
      throw NumericError("real_roots: companion eigenvalue iteration failed");
    const Eigen::VectorXcd ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double re = ev[i].real();
      const double im = ev[i].imag();
      if (std::abs(im) > 1e-7 * std::max(1.0, std::abs(re)))
        continue;
      roots.push_back(polish(reduced, dreduced, re));
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || std::abs(r - unique.back()) > 1e-12 * std::max(1.0, std::abs(r)))
      unique.push_back(r);
  }
  return unique;
}

} // namespace trisolve
