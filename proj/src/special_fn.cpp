#include "tfsieve/special_fn.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <utility>

#include "tfsieve/error.hpp"

namespace tfsieve {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

constexpr double kPi = std::numbers::pi;

Float50 to_float(const Rational& q) {
  return Float50(boost::multiprecision::numerator(q)) / Float50(boost::multiprecision::denominator(q));
}

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return Rational(0);
  boost::multiprecision::cpp_int num = 1, den = 1;
  for (int i = 1; i <= k; ++i) {
    num *= n - k + i;
    den *= i;
  }
  return Rational(num, den);
}

// Sum of all derivatives of L_r L_j; the antiderivative of p e^{-t} is -Q e^{-t}.
// Q = p + p' + p'' + ..., so that int_0^s p e^{-t} dt = Q(0) - e^{-s} Q(s).
Poly derivative_sum(const Poly& p) {
  Poly q = p;
  for (Poly d = p.derivative(); !(d.degree() == 0 && d.coeff(0) == 0); d = d.derivative()) {
    q = q + d;
  }
  return q;
}

Poly derivative_sum(int j, int r) { return derivative_sum(laguerre_poly(r, 0) * laguerre_poly(j, 0)); }

// (m!/M!) t^d (L_m^d)^2 with m = min, M = max, d = |j - r|.
Poly inversion_integrand(int j, int r) {
  const int m = std::min(j, r), d = std::abs(j - r);
  std::vector<Rational> td(d + 1, Rational(0));
  td[d] = 1;
  Rational ratio = 1;
  for (int k = m + 1; k <= m + d; ++k) ratio /= k;
  const Poly L = laguerre_poly(m, d);
  return Poly({ratio}) * Poly(std::move(td)) * L * L;
}

const Poly& cached_derivative_sum(int j, int r, bool inversion) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, bool>, Poly> cache;
  const auto [a, b] = std::minmax(j, r);
  const auto key = std::make_tuple(a, b, inversion);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, inversion ? derivative_sum(inversion_integrand(a, b)) : derivative_sum(a, b)).first;
  return it->second;
}

double integral_to(const Poly& q, double R) {
  const Float50 s = boost::math::constants::pi<Float50>() * Float50(R) * Float50(R);
  Float50 qs = 0;
  for (int k = q.degree(); k >= 0; --k) qs = qs * s + to_float(q.coeff(k));
  return static_cast<double>(to_float(q.coeff(0)) - boost::multiprecision::exp(-s) * qs);
}

}  // namespace

Poly::Poly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(Rational(0));
  trim();
}

void Poly::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Poly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Poly::operator()(double x) const {
  const Float50 xf = x;
  Float50 acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * xf + to_float(*it);
  return static_cast<double>(acc);
}

Poly Poly::derivative() const {
  if (coeffs_.size() == 1) return Poly();
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<int>(k);
  return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<Rational> s(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
  for (std::size_t k = 0; k < coeffs_.size(); ++k) s[k] += coeffs_[k];
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) s[k] += o.coeffs_[k];
  return Poly(std::move(s));
}

Poly Poly::operator*(const Poly& o) const {
  std::vector<Rational> s(coeffs_.size() + o.coeffs_.size() - 1, Rational(0));
  for (std::size_t a = 0; a < coeffs_.size(); ++a)
    for (std::size_t b = 0; b < o.coeffs_.size(); ++b) s[a + b] += coeffs_[a] * o.coeffs_[b];
  return Poly(std::move(s));
}

double laguerre(int j, int alpha, double x) {
  if (j < 0) throw Error(ErrorCode::DomainError, "laguerre: negative degree");
  if (j == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < j; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

Poly laguerre_poly(int j, int alpha) {
  if (j < 0 || alpha < 0) throw Error(ErrorCode::DomainError, "laguerre_poly: negative index");
  std::vector<Rational> c(j + 1);
  boost::multiprecision::cpp_int fact = 1;
  for (int i = 0; i <= j; ++i) {
    if (i > 0) fact *= i;
    Rational term = binomial(j + alpha, j - i) / Rational(fact);
    c[i] = (i % 2 == 0) ? term : -term;
  }
  return Poly(std::move(c));
}

void hermite_fn_all(int rmax, double t, double* out) {
  out[0] = std::pow(2.0, 0.25) * std::exp(-kPi * t * t);
  if (rmax == 0) return;
  const double s = 2.0 * std::sqrt(kPi) * t;
  out[1] = s * out[0];
  for (int n = 1; n < rmax; ++n) {
    out[n + 1] = s * std::sqrt(1.0 / (n + 1.0)) * out[n] - std::sqrt(n / (n + 1.0)) * out[n - 1];
  }
}

double hermite_fn(int r, double t) {
  if (r < 0) throw Error(ErrorCode::DomainError, "hermite_fn: negative order");
  std::vector<double> buf(r + 1);
  hermite_fn_all(r, t, buf.data());
  return buf[r];
}

double log_factorial(int n) {
  if (n <= 20) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return std::log(f);
  }
  return std::lgamma(n + 1.0);
}

std::complex<double> complex_hermite(int j, int r, std::complex<double> z) {
  if (j < 0 || r < 0) throw Error(ErrorCode::DomainError, "complex_hermite: negative index");
  const double x = kPi * std::norm(z);
  if (j == r) return laguerre(r, 0, x);
  const int lo = std::min(j, r);
  const int d = std::abs(j - r);
  if (z == 0.0) return 0.0;
  const double logmag = 0.5 * (log_factorial(lo) - log_factorial(lo + d)) + d * std::log(std::sqrt(kPi) * std::abs(z));
  const double arg = (j > r ? 1.0 : -1.0) * d * std::arg(z);
  std::complex<double> v = std::polar(std::exp(logmag), arg) * laguerre(lo, d, x);
  if (j < r && d % 2 == 1) v = -v;
  return v;
}

cplx hermite_stft(int j, int r, PhasePoint u) {
  const double a = u.time, b = u.freq;
  const cplx phase = std::polar(std::exp(-0.5 * kPi * (a * a + b * b)), -kPi * a * b);
  return phase * complex_hermite(j, r, cplx(a, -b));
}

cplx hermite_atom_inner(int r, PhasePoint w, int j, PhasePoint z) {
  const cplx v = hermite_stft(j, r, w - z);
  return std::polar(1.0, 2.0 * kPi * z.time * (w.freq - z.freq)) * std::conj(v);
}

double kernel_abs(KernelSpec spec, double d) {
  if (d < 0) throw Error(ErrorCode::DomainError, "kernel_abs: negative distance");
  const double s = kPi * d * d;
  const int alpha = spec.variant == KernelSpec::Variant::Super ? 1 : 0;
  return std::abs(laguerre(spec.order, alpha, s)) * std::exp(-0.5 * s);
}

cplx kernel(KernelSpec spec, PhasePoint z, PhasePoint w) {
  const double s = kPi * norm2(z - w);
  const int alpha = spec.variant == KernelSpec::Variant::Super ? 1 : 0;
  const double mod = laguerre(spec.order, alpha, s) * std::exp(-0.5 * s);
  return std::polar(1.0, -kPi * (z.time + w.time) * (z.freq - w.freq)) * mod;
}

double c_constant(int j, int r, double R) {
  if (j < 0 || r < 0) throw Error(ErrorCode::DomainError, "c_constant: negative index");
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorCode::DomainError, "c_constant: radius must be positive");
  return integral_to(cached_derivative_sum(j, r, false), R);
}

double inversion_constant(int j, int r, double R) {
  if (j < 0 || r < 0) throw Error(ErrorCode::DomainError, "inversion_constant: negative index");
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorCode::DomainError, "inversion_constant: radius must be positive");
  return integral_to(cached_derivative_sum(j, r, true), R);
}

Poly c_closed_poly(int r) {
  if (r < 0) throw Error(ErrorCode::DomainError, "c_closed_poly: negative order");
  return derivative_sum(r, r);
}

}  // namespace tfsieve
