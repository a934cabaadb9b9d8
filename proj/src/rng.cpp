#include "landr/rng.hpp"

#include <cmath>
#include <numbers>

namespace landr {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

template <Scalar S>
Vector<S> Rng::normal_vector(std::size_t n) {
  Vector<S> v(n);
  for (S& x : v) {
    if constexpr (is_complex_v<S>) {
      const double re = normal();
      const double im = normal();
      x = Complex(re, im) * std::numbers::sqrt2 * 0.5;
    } else {
      x = normal();
    }
  }
  return v;
}

template Vector<double> Rng::normal_vector<double>(std::size_t);
template Vector<Complex> Rng::normal_vector<Complex>(std::size_t);

}  // namespace landr
