#include "tropkp/quadrature.hpp"

#include "tropkp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace tropkp {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGaussWeights = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double lo, hi;
  Complex value;
  double error;
};

Interval rule(const std::function<Complex(Complex)>& f, Complex a, Complex delta, double lo, double hi) {
  const double half = (hi - lo) / 2;
  const double mid = (hi + lo) / 2;
  auto eval = [&](double t) { return f(a + t * delta); };
  const Complex fc = eval(mid);
  Complex kronrod = kKronrodWeights[7] * fc;
  Complex gauss = kGaussWeights[3] * fc;
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const Complex sum = eval(mid - dx) + eval(mid + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  const Complex scale = delta * half;
  return {lo, hi, kronrod * scale, std::abs((kronrod - gauss) * scale)};
}

}  // namespace

QuadratureResult integrate_segment(const std::function<Complex(Complex)>& f, Complex a, Complex b, double tol,
                                   std::size_t max_intervals) {
  const Complex delta = b - a;
  std::vector<Interval> parts{rule(f, a, delta, 0.0, 1.0)};
  std::size_t evaluations = 15;
  auto by_error = [](const Interval& x, const Interval& y) { return x.error < y.error; };
  while (true) {
    Complex total = 0.0;
    double error = 0.0;
    for (const auto& p : parts) {
      total += p.value;
      error += p.error;
    }
    if (error <= tol * std::max(1.0, std::abs(total))) return {total, error, evaluations};
    if (parts.size() >= max_intervals) throw PrecisionError("segment quadrature did not converge");
    std::pop_heap(parts.begin(), parts.end(), by_error);
    const Interval worst = parts.back();
    parts.pop_back();
    const double mid = (worst.lo + worst.hi) / 2;
    parts.push_back(rule(f, a, delta, worst.lo, mid));
    std::push_heap(parts.begin(), parts.end(), by_error);
    parts.push_back(rule(f, a, delta, mid, worst.hi));
    std::push_heap(parts.begin(), parts.end(), by_error);
    evaluations += 30;
  }
}

}  // namespace tropkp
