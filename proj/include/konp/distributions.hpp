#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "konp/rng.hpp"

namespace konp {

/// Positive lifetime distribution, written as e.g. `exp(0.5)`, `weibull(0.849,20)`,
/// `loglogistic(1,1)`, `lognormal(1.1,0.5)`, `unif(0,10)`, `lomax(0.6,1)`,
/// `pwexp(0.44,1.05;0.5,0.1,1.5)` (breakpoints; rates), `pwweibull(0.5;4,1;2,1.5)`
/// (breakpoints; shape,scale per piece), `min(exp(0.85),unif(0,10))`, `never`, `point(3)`.
///
/// Conventions: exp takes a rate; weibull is S(t) = exp(-(t/scale)^shape);
/// loglogistic is S(t) = 1/(1 + (t/scale)^shape); lomax is S(t) = (1 + t/scale)^-shape;
/// piecewise Weibull pieces are joined by their hazards, so S is continuous.
class Distribution {
 public:
  enum class Kind {
    exponential,
    weibull,
    log_logistic,
    log_normal,
    uniform,
    lomax,
    piecewise_exponential,
    piecewise_weibull,
    minimum,
    never,
    point
  };

  static Distribution parse(std::string_view text);

  static Distribution exponential(double rate);
  static Distribution weibull(double shape, double scale);
  static Distribution log_logistic(double shape, double scale);
  static Distribution log_normal(double mu, double sigma);
  static Distribution uniform(double a, double b);
  static Distribution lomax(double shape, double scale);
  static Distribution piecewise_exponential(std::vector<double> breaks, std::vector<double> rates);
  /// pieces = {shape_1, scale_1, shape_2, scale_2, ...}, one pair per segment.
  static Distribution piecewise_weibull(std::vector<double> breaks, std::vector<double> pieces);
  static Distribution minimum(Distribution a, Distribution b);
  static Distribution never();
  static Distribution point(double value);

  Kind kind() const { return kind_; }
  double sample(RandomStream& rng) const;
  /// P(X > t).
  double survival(double t) const;
  /// Canonical text form; parse(to_string()) reproduces the distribution.
  std::string to_string() const;

  bool operator==(const Distribution&) const = default;

 private:
  Distribution(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}
  double cumulative_hazard(double t) const;  // piecewise kinds only
  double invert_hazard(double h) const;      // piecewise kinds only
  void validate() const;

  Kind kind_ = Kind::never;
  std::vector<double> params_;
  std::vector<double> breaks_;
  std::vector<Distribution> children_;
};

}  // namespace konp
