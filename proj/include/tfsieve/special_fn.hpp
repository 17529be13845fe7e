#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

#include "tfsieve/types.hpp"

namespace tfsieve {

using Rational = boost::multiprecision::cpp_rational;

// Polynomial with exact rational coefficients in ascending degree order.
class Poly {
 public:
  Poly() : coeffs_{Rational(0)} {}
  explicit Poly(std::vector<Rational> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& coeff(int k) const { return coeffs_.at(k); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  Rational eval(const Rational& x) const;
  double operator()(double x) const;

  Poly derivative() const;
  Poly operator+(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  bool operator==(const Poly& o) const { return coeffs_ == o.coeffs_; }

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// L_j^alpha by the three-term recurrence. The recurrence is a polynomial
// identity in alpha, so negative integer alpha is accepted as well.
double laguerre(int j, int alpha, double x);

// L_j^alpha from the binomial sum, exact coefficients (alpha >= 0).
Poly laguerre_poly(int j, int alpha);

double hermite_fn(int r, double t);

// h_0(t)..h_rmax(t) into out[0..rmax].
void hermite_fn_all(int rmax, double t, double* out);

double log_factorial(int n);

std::complex<double> complex_hermite(int j, int r, std::complex<double> z);

// V_{h_r} h_j at u in closed form.
cplx hermite_stft(int j, int r, PhasePoint u);

// <pi(w) h_r, pi(z) h_j>.
cplx hermite_atom_inner(int r, PhasePoint w, int j, PhasePoint z);

struct KernelSpec {
  enum class Variant { Single, Super };
  int order = 0;
  Variant variant = Variant::Single;

  static KernelSpec single(int r) { return {r, Variant::Single}; }
  static KernelSpec super(int n) { return {n, Variant::Super}; }
};

double kernel_abs(KernelSpec spec, double d);
cplx kernel(KernelSpec spec, PhasePoint z, PhasePoint w);

// C_{j,r}(R) = int_0^{pi R^2} L_r L_j e^{-t} dt.
double c_constant(int j, int r, double R);

// int_{D_R} |H_{j,r}(z)|^2 e^{-pi|z|^2} dz, the normalisation of the local
// inversion coefficients. Equals c_constant(r, r, R) when j = r.
double inversion_constant(int j, int r, double R);

// P_r with C_{r,r}(R) = 1 - e^{-pi R^2} P_r(pi R^2).
Poly c_closed_poly(int r);

}  // namespace tfsieve
