#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "sseq/errors.hpp"

namespace sseq {

// Element of the prime field F_p. The modulus is process-wide state, set once
// per run (by the CLI from the document header, or by a test); every value is
// a canonical residue in [0, p).
class Fp {
 public:
  Fp() : v_(0) {}
  Fp(long long n) : v_(norm(n)) {}  // NOLINT: implicit for integer literals

  static void set_modulus(std::uint32_t p) {
    if (!is_prime(p)) throw DimensionMismatch("F_p modulus must be prime, got " + std::to_string(p));
    p_ = p;
  }
  static std::uint32_t modulus() { return p_; }

  std::uint32_t residue() const { return v_; }

  friend Fp operator+(Fp a, Fp b) { return from_raw((a.v_ + b.v_) % p_); }
  friend Fp operator-(Fp a, Fp b) { return from_raw((a.v_ + p_ - b.v_) % p_); }
  friend Fp operator*(Fp a, Fp b) {
    return from_raw(static_cast<std::uint32_t>((std::uint64_t(a.v_) * b.v_) % p_));
  }
  friend Fp operator/(Fp a, Fp b) { return a * b.inverse(); }
  Fp operator-() const { return from_raw(v_ == 0 ? 0 : p_ - v_); }

  Fp& operator+=(Fp b) { return *this = *this + b; }
  Fp& operator-=(Fp b) { return *this = *this - b; }
  Fp& operator*=(Fp b) { return *this = *this * b; }
  Fp& operator/=(Fp b) { return *this = *this / b; }

  friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
  friend bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

  Fp inverse() const {
    if (v_ == 0) throw DimensionMismatch("division by zero in F_p");
    // extended Euclid on (v, p)
    std::int64_t t = 0, new_t = 1, r = p_, new_r = v_;
    while (new_r != 0) {
      std::int64_t q = r / new_r;
      t = std::exchange(new_t, t - q * new_t);
      r = std::exchange(new_r, r - q * new_r);
    }
    if (t < 0) t += p_;
    return from_raw(static_cast<std::uint32_t>(t));
  }

  std::string str() const { return std::to_string(v_); }
  friend std::ostream& operator<<(std::ostream& os, Fp a) { return os << a.v_; }

 private:
  static Fp from_raw(std::uint32_t v) {
    Fp x;
    x.v_ = v;
    return x;
  }
  static std::uint32_t norm(long long n) {
    long long m = n % static_cast<long long>(p_);
    if (m < 0) m += p_;
    return static_cast<std::uint32_t>(m);
  }
  static bool is_prime(std::uint32_t p) {
    if (p < 2) return false;
    for (std::uint32_t d = 2; std::uint64_t(d) * d <= p; ++d)
      if (p % d == 0) return false;
    return true;
  }

  std::uint32_t v_;
  static inline std::uint32_t p_ = 7;
};

// Exact rational, a thin value wrapper over GMP's mpq_class so that all
// arithmetic returns canonicalized Rational (gmpxx expression templates do
// not play well with Eigen otherwise).
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(long long n) : q_(static_cast<long>(n)) {}  // NOLINT: implicit for literals
  Rational(long long num, long long den) : q_(static_cast<long>(num), static_cast<long>(den)) {
    if (den == 0) throw DimensionMismatch("rational with zero denominator");
    q_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  friend Rational operator+(const Rational& a, const Rational& b) { return wrap(a.q_ + b.q_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return wrap(a.q_ - b.q_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return wrap(a.q_ * b.q_); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.q_ == 0) throw DimensionMismatch("division by zero in Q");
    return wrap(a.q_ / b.q_);
  }
  Rational operator-() const { return wrap(-q_); }

  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }

  Rational inverse() const { return Rational(1) / *this; }

  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& a) { return os << a.str(); }

 private:
  static Rational wrap(const mpq_class& q) {
    Rational x;
    x.q_ = q;
    return x;
  }
  mpq_class q_;
};

// Field tag used in document headers: "Fp:<p>" or "Q".
template <class S>
std::string field_name();
template <>
inline std::string field_name<Fp>() {
  return "Fp:" + std::to_string(Fp::modulus());
}
template <>
inline std::string field_name<Rational>() {
  return "Q";
}

template <class S>
S parse_scalar(const std::string& tok);

template <>
inline Fp parse_scalar<Fp>(const std::string& tok) {
  return Fp(std::stoll(tok));
}

template <>
inline Rational parse_scalar<Rational>(const std::string& tok) {
  auto slash = tok.find('/');
  if (slash == std::string::npos) {
    mpq_class q(tok);
    return Rational(q);
  }
  mpq_class q(tok.substr(0, slash) + "/" + tok.substr(slash + 1));
  return Rational(q);
}

}  // namespace sseq

namespace Eigen {

template <>
struct NumTraits<sseq::Fp> {
  using Real = sseq::Fp;
  using NonInteger = sseq::Fp;
  using Literal = sseq::Fp;
  using Nested = sseq::Fp;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 2,
    MulCost = 4
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<sseq::Rational> {
  using Real = sseq::Rational;
  using NonInteger = sseq::Rational;
  using Literal = sseq::Rational;
  using Nested = sseq::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 16
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
