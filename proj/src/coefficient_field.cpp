#include "trisolve/coefficient_field.hpp"

#include "trisolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace trisolve {

double Box::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k)
    v *= extents[static_cast<std::size_t>(k)];
  return v;
}

bool Box::contains(const Point& x) const {
  for (int k = 0; k < dim; ++k) {
    const double len = extents[static_cast<std::size_t>(k)];
    const double tol = 1e-12 * len;
    const double xk = x[static_cast<std::size_t>(k)];
    if (!(xk >= -tol && xk <= len + tol))
      return false;
  }
  return true;
}

void Box::require_contains(const Point& x) const {
  if (!contains(x)) {
    std::ostringstream os;
    os << "point (" << x[0] << ", " << x[1];
    if (dim == 3)
      os << ", " << x[2];
    os << ") lies outside the domain box";
    throw DomainError(os.str());
  }
}

void Box::validate() const {
  if (dim != 2 && dim != 3)
    throw ParameterError("box dimension must be 2 or 3");
  for (int k = 0; k < dim; ++k)
    if (!(extents[static_cast<std::size_t>(k)] > 0.0))
      throw ParameterError("box extents must be positive");
}

CoefficientField::CoefficientField(const Box& box, std::variant<Constant, Affine, Sampled> repr)
    : box_(box), repr_(std::move(repr)) {
  box_.validate();
  cache();
}

CoefficientField CoefficientField::constant(const Box& box, double value) {
  return CoefficientField(box, Constant{value});
}

CoefficientField CoefficientField::affine(const Box& box, double base, std::vector<double> slope) {
  if (static_cast<int>(slope.size()) != box.dim)
    throw ParameterError("affine field: slope length must equal the domain dimension");
  return CoefficientField(box, Affine{base, std::move(slope)});
}

CoefficientField CoefficientField::sampled(const Box& box, std::vector<int> divisions,
                                           std::vector<double> nodal_values) {
  if (static_cast<int>(divisions.size()) != box.dim)
    throw ParameterError("sampled field: divisions length must equal the domain dimension");
  std::size_t count = 1;
  for (int d : divisions) {
    if (d < 1)
      throw ParameterError("sampled field: divisions must be >= 1");
    count *= static_cast<std::size_t>(d + 1);
  }
  if (nodal_values.size() != count)
    throw ParameterError("sampled field: nodal value count does not match the grid");
  return CoefficientField(box, Sampled{std::move(divisions), std::move(nodal_values)});
}

CoefficientField::Kind CoefficientField::kind() const {
  switch (repr_.index()) {
  case 0:
    return Kind::constant;
  case 1:
    return Kind::affine;
  default:
    return Kind::sampled;
  }
}

double CoefficientField::eval_sampled(const Sampled& s, const Point& x) const {
  const int dim = box_.dim;
  std::array<int, 3> cell{};
  std::array<double, 3> t{};
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const int n = s.divisions[ku];
    const double h = box_.extents[ku] / n;
    const double xk = std::clamp(x[ku], 0.0, box_.extents[ku]);
    int i = static_cast<int>(std::floor(xk / h));
    i = std::clamp(i, 0, n - 1);
    cell[ku] = i;
    t[ku] = std::clamp(xk / h - i, 0.0, 1.0);
    if (k > 0)
      stride[ku] = stride[ku - 1] * static_cast<std::size_t>(s.divisions[ku - 1] + 1);
  }
  // Kuhn simplex containing x: axes ordered by decreasing local coordinate
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.begin() + dim,
            [&](int a, int b) { return t[static_cast<std::size_t>(a)] > t[static_cast<std::size_t>(b)]; });
  std::size_t idx = 0;
  for (int k = 0; k < dim; ++k)
    idx += static_cast<std::size_t>(cell[static_cast<std::size_t>(k)]) * stride[static_cast<std::size_t>(k)];
  double value = s.values[idx];
  for (int j = 0; j < dim; ++j) {
    const auto axis = static_cast<std::size_t>(order[static_cast<std::size_t>(j)]);
    const std::size_t next = idx + stride[axis];
    value += t[axis] * (s.values[next] - s.values[idx]);
    idx = next;
  }
  return value;
}

double CoefficientField::operator()(const Point& x) const {
  box_.require_contains(x);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return r.value;
        } else if constexpr (std::is_same_v<T, Affine>) {
          double v = r.base;
          for (int k = 0; k < box_.dim; ++k)
            v += r.slope[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
          return v;
        } else {
          return eval_sampled(r, x);
        }
      },
      repr_);
}

void CoefficientField::cache() {
  const int dim = box_.dim;
  const double vol = box_.volume();
  if (const auto* c = std::get_if<Constant>(&repr_)) {
    inf_ = sup_ = c->value;
    integral_ = c->value * vol;
  } else if (const auto* a = std::get_if<Affine>(&repr_)) {
    inf_ = sup_ = a->base;
    double mean = a->base;
    for (int k = 0; k < dim; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double span = a->slope[ku] * box_.extents[ku];
      inf_ += std::min(0.0, span);
      sup_ += std::max(0.0, span);
      mean += 0.5 * span;
    }
    integral_ = mean * vol;
  } else {
    const auto& s = std::get<Sampled>(repr_);
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    inf_ = *lo;
    sup_ = *hi;
    // exact integral of the Kuhn-P1 interpolant: each simplex contributes
    // (volume / (dim + 1)) * (sum of its vertex values)
    std::array<std::size_t, 3> stride{1, 1, 1};
    std::array<int, 3> n{1, 1, 1};
    for (int k = 0; k < dim; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      n[ku] = s.divisions[ku];
      if (k > 0)
        stride[ku] = stride[ku - 1] * static_cast<std::size_t>(s.divisions[ku - 1] + 1);
    }
    double cell_vol = 1.0;
    for (int k = 0; k < dim; ++k)
      cell_vol *= box_.extents[static_cast<std::size_t>(k)] / n[static_cast<std::size_t>(k)];
    const double simplex_weight = cell_vol / (dim == 2 ? 2.0 : 6.0) / (dim + 1);
    std::array<int, 3> perm{0, 1, 2};
    double total = 0.0;
    for (int cz = 0; cz < (dim == 3 ? n[2] : 1); ++cz)
      for (int cy = 0; cy < n[1]; ++cy)
        for (int cx = 0; cx < n[0]; ++cx) {
          const std::size_t base = static_cast<std::size_t>(cx) * stride[0] +
                                   static_cast<std::size_t>(cy) * stride[1] +
                                   (dim == 3 ? static_cast<std::size_t>(cz) * stride[2] : 0);
          std::iota(perm.begin(), perm.end(), 0);
          do {
            std::size_t idx = base;
            double sum = s.values[idx];
            for (int j = 0; j < dim; ++j) {
              idx += stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
              sum += s.values[idx];
            }
            total += simplex_weight * sum;
          } while (std::next_permutation(perm.begin(), perm.begin() + dim));
        }
    integral_ = total;
  }
}

CoefficientField CoefficientField::scaled(double t) const {
  return std::visit(
      [&](const auto& r) -> CoefficientField {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return constant(box_, t * r.value);
        } else if constexpr (std::is_same_v<T, Affine>) {
          std::vector<double> slope = r.slope;
          for (double& v : slope)
            v *= t;
          return affine(box_, t * r.base, std::move(slope));
        } else {
          std::vector<double> values = r.values;
          for (double& v : values)
            v *= t;
          return sampled(box_, r.divisions, std::move(values));
        }
      },
      repr_);
}

void CoefficientField::require_alpha_role(const char* name) const {
  if (!(inf_ > 0.0))
    throw ParameterError(std::string(name) + ": infimum must be positive");
}

void CoefficientField::require_beta_role(const char* name) const {
  if (!(inf_ >= 0.0))
    throw ParameterError(std::string(name) + ": infimum must be nonnegative");
  if (!(integral_ > 0.0))
    throw ParameterError(std::string(name) + ": integral must be positive");
}

} // namespace trisolve
