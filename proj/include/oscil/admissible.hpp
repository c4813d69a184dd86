#pragma once

// Trial functions for the quadratic forms: w with w' and w'' available in
// closed form, on a fixed interval [a, b].

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "oscil/errors.hpp"

namespace oscil {

enum class BoundaryClass {
  focal,  // w(a) = 0, w'(b) = 0
  free,
};

class AdmissibleFunction {
 public:
  using Fn = std::function<double(double)>;

  AdmissibleFunction(Fn w, Fn dw, Fn ddw, double a, double b, BoundaryClass cls)
      : w_(std::move(w)), dw_(std::move(dw)), ddw_(std::move(ddw)), a_(a), b_(b), cls_(cls) {
    if (!(b_ > a_)) throw InvalidArgument("admissible function needs b > a");
    if (cls_ == BoundaryClass::focal) {
      if (std::abs(w_(a_)) > 1e-12) throw InvalidArgument("focal class requires w(a) = 0, got " + format_real(w_(a_)));
      if (std::abs(dw_(b_)) > 1e-12)
        throw InvalidArgument("focal class requires w'(b) = 0, got " + format_real(dw_(b_)));
    }
  }

  /// w = sum c[k] (x - a)^k.
  static AdmissibleFunction polynomial(std::vector<double> c, double a, double b, BoundaryClass cls) {
    auto coef = std::make_shared<const std::vector<double>>(std::move(c));
    auto eval = [coef, a](int deriv) {
      return [coef, a, deriv](double x) {
        const double s = x - a;
        double acc = 0.0;
        for (std::size_t k = coef->size(); k-- > static_cast<std::size_t>(deriv);) {
          double f = 1.0;
          for (int d = 0; d < deriv; ++d) f *= static_cast<double>(k - d);
          acc = acc * s + f * (*coef)[k];
        }
        return acc;
      };
    };
    return AdmissibleFunction(eval(0), eval(1), eval(2), a, b, cls);
  }

  double operator()(double x) const { return w_(x); }
  double d1(double x) const { return dw_(x); }
  double d2(double x) const { return ddw_(x); }
  double a() const { return a_; }
  double b() const { return b_; }
  BoundaryClass boundary_class() const { return cls_; }

 private:
  Fn w_, dw_, ddw_;
  double a_, b_;
  BoundaryClass cls_;
};

}  // namespace oscil
