#pragma once

#include <vector>

#include "gw/rational.hpp"

namespace gw {

// Exact Gaussian-rational number re + i im.
struct GaussRational {
  Rational re{0};
  Rational im{0};
  GaussRational() = default;
  GaussRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  bool is_zero() const { return re == 0 && im == 0; }
  friend GaussRational operator+(const GaussRational& x, const GaussRational& y) {
    return {x.re + y.re, x.im + y.im};
  }
  friend GaussRational operator-(const GaussRational& x, const GaussRational& y) {
    return {x.re - y.re, x.im - y.im};
  }
  friend GaussRational operator*(const GaussRational& x, const GaussRational& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend bool operator==(const GaussRational& x, const GaussRational& y) {
    return x.re == y.re && x.im == y.im;
  }
};

// Truncated series sum a_{k,l} c^k s^l with k, l <= order.
class BiSeries {
 public:
  explicit BiSeries(int order = 0) : order_(order), a_((order + 1) * (order + 1)) {}
  static BiSeries constant(int order, const GaussRational& v) {
    BiSeries r(order);
    r.at(0, 0) = v;
    return r;
  }
  static BiSeries monomial(int order, int k, int l, const GaussRational& v) {
    BiSeries r(order);
    if (k <= order && l <= order) r.at(k, l) = v;
    return r;
  }

  int order() const { return order_; }
  GaussRational& at(int k, int l) { return a_[k * (order_ + 1) + l]; }
  const GaussRational& at(int k, int l) const { return a_[k * (order_ + 1) + l]; }

  friend BiSeries operator+(const BiSeries& x, const BiSeries& y) {
    BiSeries r(x.order_);
    for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
    return r;
  }
  friend BiSeries operator-(const BiSeries& x, const BiSeries& y) {
    BiSeries r(x.order_);
    for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
    return r;
  }
  friend BiSeries operator*(const BiSeries& x, const BiSeries& y) {
    const int K = x.order_;
    BiSeries r(K);
    for (int k1 = 0; k1 <= K; ++k1)
      for (int l1 = 0; l1 <= K; ++l1) {
        const auto& u = x.at(k1, l1);
        if (u.is_zero()) continue;
        for (int k2 = 0; k1 + k2 <= K; ++k2)
          for (int l2 = 0; l1 + l2 <= K; ++l2) {
            const auto& v = y.at(k2, l2);
            if (!v.is_zero()) r.at(k1 + k2, l1 + l2) = r.at(k1 + k2, l1 + l2) + u * v;
          }
      }
    return r;
  }
  BiSeries scaled(const GaussRational& f) const {
    BiSeries r(order_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * f;
    return r;
  }
  friend bool operator==(const BiSeries& x, const BiSeries& y) { return x.a_ == y.a_; }

  // exp of a series without constant term.
  BiSeries exp() const {
    BiSeries result = constant(order_, GaussRational(1));
    BiSeries power = result;
    for (int k = 1; k <= 2 * order_; ++k) {
      power = (power * *this).scaled(GaussRational(Rational(1, k)));
      result = result + power;
    }
    return result;
  }

  // Gaussian average over s (moments (l-1)!!), leaving a series in c.
  std::vector<GaussRational> gaussian_average() const {
    std::vector<GaussRational> out(order_ + 1);
    for (int k = 0; k <= order_; ++k)
      for (int l = 0; l <= order_; l += 2) {
        Rational moment = 1;
        for (int j = l - 1; j > 0; j -= 2) moment *= j;
        out[k] = out[k] + at(k, l) * GaussRational(moment);
      }
    return out;
  }

 private:
  int order_;
  std::vector<GaussRational> a_;
};

}  // namespace gw
