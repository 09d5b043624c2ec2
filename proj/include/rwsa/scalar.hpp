#pragma once

#include <ostream>
#include <stdexcept>
#include <string>

#include "rwsa/errors.hpp"
#include "rwsa/rational.hpp"

namespace rwsa {

/// Gaussian rational re + i*im.
struct Gaussian {
  Rational re;
  Rational im;

  Gaussian() = default;
  Gaussian(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Gaussian(int r) : re(r) {}                   // NOLINT(google-explicit-constructor)
  Gaussian(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  Gaussian(const Gaussian&) = default;
  Gaussian(Gaussian&&) noexcept = default;
  Gaussian& operator=(const Gaussian&) = default;
  Gaussian& operator=(Gaussian&&) noexcept = default;

  static Gaussian i(Rational v = 1) { return {Rational(0), std::move(v)}; }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }

  Gaussian conj() const { return {re, -im}; }
  Gaussian operator-() const { return {-re, -im}; }
  Gaussian& operator+=(const Gaussian& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Gaussian& operator-=(const Gaussian& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Gaussian& operator*=(const Gaussian& o) {
    *this = *this * o;
    return *this;
  }
  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(const Gaussian& a, const Gaussian& b) {
    Gaussian r;
    mul_into(r, a, b);
    return r;
  }
  friend Gaussian operator/(const Gaussian& a, const Gaussian& b) {
    const Rational norm = b.re * b.re + b.im * b.im;
    if (norm.is_zero()) throw std::domain_error("Gaussian: division by zero");
    Gaussian r = a * b.conj();
    r.re /= norm;
    r.im /= norm;
    return r;
  }
  friend bool operator==(const Gaussian& a, const Gaussian& b) = default;

  /// out = a * b; skips the cross terms when either factor is purely real or
  /// purely imaginary, which is the common case in the recursion.
  static void mul_into(Gaussian& out, const Gaussian& a, const Gaussian& b) {
    mpq_class& ore = out.re.mpq();
    mpq_class& oim = out.im.mpq();
    const mpq_class& ar = a.re.mpq();
    const mpq_class& ai = a.im.mpq();
    const mpq_class& br = b.re.mpq();
    const mpq_class& bi = b.im.mpq();
    const bool a_im0 = sgn(ai) == 0;
    const bool b_im0 = sgn(bi) == 0;
    const bool a_re0 = sgn(ar) == 0;
    const bool b_re0 = sgn(br) == 0;
    if (a_im0 && b_im0) {
      mpq_mul(ore.get_mpq_t(), ar.get_mpq_t(), br.get_mpq_t());
      oim = 0;
    } else if (a_re0 && b_re0) {
      mpq_mul(ore.get_mpq_t(), ai.get_mpq_t(), bi.get_mpq_t());
      mpq_neg(ore.get_mpq_t(), ore.get_mpq_t());
      oim = 0;
    } else if (a_im0 && b_re0) {
      mpq_mul(oim.get_mpq_t(), ar.get_mpq_t(), bi.get_mpq_t());
      ore = 0;
    } else if (a_re0 && b_im0) {
      mpq_mul(oim.get_mpq_t(), ai.get_mpq_t(), br.get_mpq_t());
      ore = 0;
    } else {
      mpq_class t1 = ar * br - ai * bi;
      mpq_class t2 = ar * bi + ai * br;
      ore.swap(t1);
      oim.swap(t2);
    }
  }

  std::string str() const {
    if (im.is_zero()) return re.str();
    if (re.is_zero()) return im.str() + "i";
    return "(" + re.str() + (im.sign() > 0 ? "+" : "") + im.str() + "i)";
  }
  friend std::ostream& operator<<(std::ostream& os, const Gaussian& g) { return os << g.str(); }
};

/// Gaussian rational times an integer power of sqrt(pi).
class Scalar {
 public:
  Scalar() = default;
  Scalar(Gaussian v, int sqrt_pi_exp = 0) : value_(std::move(v)), exp_(sqrt_pi_exp) {}  // NOLINT
  Scalar(int v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  const Gaussian& value() const { return value_; }
  const Rational& re() const { return value_.re; }
  const Rational& im() const { return value_.im; }
  int sqrt_pi_exp() const { return exp_; }
  bool is_zero() const { return value_.is_zero(); }

  /// Real rational with no sqrt(pi) factor.
  bool is_rational() const { return value_.is_real() && (exp_ == 0 || is_zero()); }

  Scalar operator-() const { return {-value_, exp_}; }
  Scalar& operator+=(const Scalar& o) { return accumulate(o, false); }
  Scalar& operator-=(const Scalar& o) { return accumulate(o, true); }
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    return {a.value_ * b.value_, a.exp_ + b.exp_};
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    return {a.value_ / b.value_, a.exp_ - b.exp_};
  }

  /// Zero compares equal to zero at any exponent.
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.exp_ == b.exp_ && a.value_ == b.value_;
  }

  std::string str() const {
    std::string s = value_.str();
    if (exp_ != 0 && !is_zero()) s += "*sqrt(pi)^" + std::to_string(exp_);
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

 private:
  Scalar& accumulate(const Scalar& o, bool subtract) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      value_ = subtract ? -o.value_ : o.value_;
      exp_ = o.exp_;
      return *this;
    }
    if (exp_ != o.exp_) {
      throw exponent_mismatch("Scalar: adding sqrt(pi)^" + std::to_string(exp_) + " and sqrt(pi)^" +
                              std::to_string(o.exp_));
    }
    if (subtract) value_ -= o.value_;
    else value_ += o.value_;
    return *this;
  }

  Gaussian value_;
  int exp_ = 0;
};

/// Gamma(k + 1/2) = (2k)! / (4^k k!) * sqrt(pi).
inline Scalar gamma_half(unsigned k) {
  Integer four_k;
  mpz_ui_pow_ui(four_k.get_mpz_t(), 4, k);
  return Scalar(Gaussian(Rational(factorial(2 * k), four_k * factorial(k))), 1);
}

/// a + b*sqrt(d) with d in {2, 3}.
class QuadExt {
 public:
  QuadExt() = default;
  QuadExt(Scalar a, Scalar b, int d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (d != 2 && d != 3) throw std::invalid_argument("QuadExt: only sqrt(2) and sqrt(3) are supported");
  }
  static QuadExt rational(Scalar a, int d) { return {std::move(a), Scalar(), d}; }

  const Scalar& a() const { return a_; }
  const Scalar& b() const { return b_; }
  int d() const { return d_; }
  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

  QuadExt operator-() const { return {-a_, -b_, d_}; }
  QuadExt conj() const { return {a_, -b_, d_}; }
  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    check_same(x, y);
    return {x.a_ + y.a_, x.b_ + y.b_, x.d_};
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    check_same(x, y);
    return {x.a_ - y.a_, x.b_ - y.b_, x.d_};
  }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    check_same(x, y);
    return {x.a_ * y.a_ + Scalar(x.d_) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, x.d_};
  }
  /// Only for divisors with a rational norm a^2 - d b^2 (always the case for
  /// the sine and cosine values used here).
  QuadExt inverse() const {
    const Scalar norm = a_ * a_ - Scalar(d_) * b_ * b_;
    if (norm.is_zero()) throw std::domain_error("QuadExt: division by zero");
    return {a_ / norm, -b_ / norm, d_};
  }
  QuadExt pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    QuadExt r{Scalar(1), Scalar(), d_};
    QuadExt base = *this;
    while (e > 0) {
      if (e & 1) r = r * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return r;
  }
  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }

  std::string str() const { return a_.str() + " + (" + b_.str() + ")*sqrt(" + std::to_string(d_) + ")"; }

 private:
  static void check_same(const QuadExt& x, const QuadExt& y) {
    if (x.d_ != y.d_) throw std::invalid_argument("QuadExt: mixed extensions");
  }

  Scalar a_;
  Scalar b_;
  int d_ = 2;
};

}  // namespace rwsa
