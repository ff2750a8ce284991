#include "trisolve/nonlinearity.hpp"

#include "trisolve/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace trisolve {

namespace {

constexpr double kQuadratureTol = 1e-10;

} // namespace

Nonlinearity Nonlinearity::polynomial(CoefficientField spatial, std::vector<double> coeffs) {
  Nonlinearity nl(std::move(spatial));
  nl.shape_ = Shape::polynomial;
  coeffs.insert(coeffs.begin(), 0.0);
  nl.poly_ = Polynomial(std::move(coeffs));
  nl.poly_primitive_ = nl.poly_.antiderivative();
  nl.poly_derivative_ = nl.poly_.derivative();
  nl.name_ = "poly";
  nl.q_ = std::max(1, nl.poly_.degree());
  return nl;
}

Nonlinearity Nonlinearity::cubic(CoefficientField beta, double a, double b, double c) {
  return polynomial(std::move(beta), {a, b, -c});
}

const std::vector<std::string>& Nonlinearity::catalog() {
  static const std::vector<std::string> names{"sin", "atan", "bounded-exp"};
  return names;
}

Nonlinearity Nonlinearity::analytic(CoefficientField spatial, const std::string& name, double q,
                                    double C) {
  std::function<double(double)> h;
  std::function<double(double)> H;
  if (name == "sin") {
    h = [](double xi) { return std::sin(xi); };
    H = [](double xi) { return 2.0 * std::sin(0.5 * xi) * std::sin(0.5 * xi); };
  } else if (name == "atan") {
    h = [](double xi) { return std::atan(xi); };
    H = [](double xi) { return xi * std::atan(xi) - 0.5 * std::log1p(xi * xi); };
  } else if (name == "bounded-exp") {
    h = [](double xi) { return xi * std::exp(-xi * xi); };
    H = [](double xi) { return -0.5 * std::expm1(-xi * xi); };
  } else {
    throw ParameterError("unknown analytic nonlinearity '" + name + "'");
  }
  Nonlinearity nl = analytic(std::move(spatial), name, std::move(h), q, C);
  nl.primitive_fn_ = std::move(H);
  return nl;
}

Nonlinearity Nonlinearity::analytic(CoefficientField spatial, std::string name,
                                    std::function<double(double)> h, double q, double C) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw ParameterError("analytic nonlinearity: growth exponent q must be positive and finite");
  if (!(C >= 0.0))
    throw ParameterError("analytic nonlinearity: growth constant C must be nonnegative");
  Nonlinearity nl(std::move(spatial));
  nl.shape_ = Shape::analytic;
  nl.name_ = std::move(name);
  nl.fn_ = std::move(h);
  nl.q_ = q;
  nl.C_ = C;
  return nl;
}

double Nonlinearity::shape_value(double xi) const {
  return shape_ == Shape::polynomial ? poly_(xi) : fn_(xi);
}

double Nonlinearity::shape_primitive(double xi) const {
  if (shape_ == Shape::polynomial)
    return poly_primitive_(xi);
  if (xi == 0.0)
    return 0.0;
  if (primitive_fn_)
    return primitive_fn_(xi);
  // Dyadic pieces [0, 1], [1, 2], [2, 4], ... each mapped onto [0, 1], where
  // the error estimate of the quadrature routine is on the integration scale.
  const double sign = xi < 0.0 ? -1.0 : 1.0;
  const double end = std::abs(xi);
  double total = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  for (double a = 0.0, b = std::min(1.0, end); a < end; a = b, b = std::min(2.0 * b, end)) {
    const double len = b - a;
    auto g = [&](double t) { return fn_(sign * (a + len * t)); };
    double e = 0.0;
    double l = 0.0;
    total += len * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                       g, 0.0, 1.0, 12, kQuadratureTol, &e, &l);
    error += len * e;
    l1 += len * l;
  }
  if (!(error <= kQuadratureTol * std::max(l1, std::numeric_limits<double>::min()))) {
    std::ostringstream os;
    os << "primitive of '" << name_ << "' at " << xi << ": quadrature error " << error
       << " exceeds relative tolerance " << kQuadratureTol;
    throw NumericError(os.str(), l1 > 0 ? error / l1 : error);
  }
  return sign * total;
}

double Nonlinearity::shape_derivative(double xi) const {
  if (shape_ == Shape::polynomial)
    return poly_derivative_(xi);
  const double h = std::max(1e-6, 1e-6 * std::abs(xi));
  return (fn_(xi + h) - fn_(xi - h)) / (2.0 * h);
}

double Nonlinearity::value(const Point& x, double xi) const { return spatial_(x) * shape_value(xi); }

double Nonlinearity::primitive(const Point& x, double xi) const {
  return spatial_(x) * shape_primitive(xi);
}

double Nonlinearity::derivative(const Point& x, double xi) const {
  return spatial_(x) * shape_derivative(xi);
}

double Nonlinearity::integral_primitive(double xi) const {
  if (xi == 0.0)
    return 0.0;
  return spatial_.integral() * shape_primitive(xi);
}

double Nonlinearity::sup_primitive(double xi) const {
  const double H = shape_primitive(xi);
  return H > 0.0 ? spatial_.sup() * H : spatial_.inf() * H;
}

double Nonlinearity::growth_exponent() const { return q_; }

double Nonlinearity::growth_constant() const {
  if (shape_ == Shape::analytic)
    return C_;
  double sum = 0.0;
  for (double a : poly_.coeffs())
    sum += std::abs(a);
  return std::max(std::abs(spatial_.sup()), std::abs(spatial_.inf())) * sum;
}

int Nonlinearity::quadrature_degree() const {
  return std::max(4, static_cast<int>(std::ceil(q_)) + 2);
}

Nonlinearity Nonlinearity::scaled(double t) const {
  Nonlinearity out = *this;
  out.spatial_ = spatial_.scaled(t);
  if (shape_ == Shape::analytic)
    out.C_ = C_ * std::abs(t);
  return out;
}

GrowthReport check_growth(const Nonlinearity& f, double p, int n) {
  if (!(p > 1.0) || p > static_cast<double>(n))
    throw ParameterError("growth check requires 1 < p <= n");
  GrowthReport r;
  r.p = p;
  r.n = n;
  r.q = f.growth_exponent();
  const double nd = static_cast<double>(n);
  r.q_limit = (p == nd) ? std::numeric_limits<double>::infinity() : (p * nd - nd + p) / (nd - p);
  r.admissible = r.q > 0.0 && r.q < r.q_limit;
  return r;
}

} // namespace trisolve
