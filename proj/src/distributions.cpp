#include "konp/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "konp/error.hpp"
#include "konp/numeric.hpp"

namespace konp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad_spec(std::string_view text, const std::string& why) {
  throw ValidationError(ErrorCode::parse_error,
                        "invalid distribution '" + std::string(text) + "': " + why);
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& xs, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ',';
    out += format_number(xs[i]);
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Distribution parse_all() {
    Distribution d = parse_one();
    skip_space();
    if (pos_ != text_.size()) bad_spec(text_, "trailing characters");
    return d;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) bad_spec(text_, std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string id(text_.substr(start, pos_ - start));
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return id;
  }

  double number() {
    skip_space();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc()) bad_spec(text_, "expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  // Numeric arguments as ';'-separated groups of ','-separated numbers.
  std::vector<std::vector<double>> groups() {
    std::vector<std::vector<double>> out(1);
    expect('(');
    if (accept(')')) return {};
    for (;;) {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] != ';' && text_[pos_] != ')')
        out.back().push_back(number());
      if (accept(',')) continue;
      if (accept(';')) {
        out.emplace_back();
        continue;
      }
      expect(')');
      return out;
    }
  }

  static std::vector<double> flat(const std::vector<std::vector<double>>& g, std::size_t count,
                                  std::string_view text) {
    if (g.size() != 1 || g[0].size() != count)
      bad_spec(text, "expected " + std::to_string(count) + " arguments");
    return g[0];
  }

  Distribution parse_one() {
    const std::string name = identifier();
    if (name.empty()) bad_spec(text_, "expected a distribution name");
    if (name == "never" || name == "none") {
      if (accept('(')) expect(')');
      return Distribution::never();
    }
    if (name == "min") {
      expect('(');
      Distribution a = parse_one();
      expect(',');
      Distribution b = parse_one();
      expect(')');
      return Distribution::minimum(std::move(a), std::move(b));
    }
    const auto g = groups();
    if (name == "exp" || name == "exponential")
      return Distribution::exponential(flat(g, 1, text_)[0]);
    if (name == "point") return Distribution::point(flat(g, 1, text_)[0]);
    if (name == "weibull") {
      const auto p = flat(g, 2, text_);
      return Distribution::weibull(p[0], p[1]);
    }
    if (name == "loglogistic") {
      const auto p = flat(g, 2, text_);
      return Distribution::log_logistic(p[0], p[1]);
    }
    if (name == "lognormal") {
      const auto p = flat(g, 2, text_);
      return Distribution::log_normal(p[0], p[1]);
    }
    if (name == "unif" || name == "uniform") {
      const auto p = flat(g, 2, text_);
      return Distribution::uniform(p[0], p[1]);
    }
    if (name == "lomax") {
      const auto p = flat(g, 2, text_);
      return Distribution::lomax(p[0], p[1]);
    }
    if (name == "pwexp") {
      if (g.size() != 2) bad_spec(text_, "pwexp takes breakpoints; rates");
      return Distribution::piecewise_exponential(g[0], g[1]);
    }
    if (name == "pwweibull") {
      if (g.size() < 2) bad_spec(text_, "pwweibull takes breakpoints; shape,scale; ...");
      std::vector<double> pieces;
      for (std::size_t i = 1; i < g.size(); ++i) {
        if (g[i].size() != 2) bad_spec(text_, "each pwweibull piece is shape,scale");
        pieces.insert(pieces.end(), g[i].begin(), g[i].end());
      }
      return Distribution::piecewise_weibull(g[0], pieces);
    }
    bad_spec(text_, "unknown distribution '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Distribution Distribution::parse(std::string_view text) { return Parser(text).parse_all(); }

Distribution Distribution::exponential(double rate) {
  Distribution d(Kind::exponential, {rate});
  d.validate();
  return d;
}

Distribution Distribution::weibull(double shape, double scale) {
  Distribution d(Kind::weibull, {shape, scale});
  d.validate();
  return d;
}

Distribution Distribution::log_logistic(double shape, double scale) {
  Distribution d(Kind::log_logistic, {shape, scale});
  d.validate();
  return d;
}

Distribution Distribution::log_normal(double mu, double sigma) {
  Distribution d(Kind::log_normal, {mu, sigma});
  d.validate();
  return d;
}

Distribution Distribution::uniform(double a, double b) {
  Distribution d(Kind::uniform, {a, b});
  d.validate();
  return d;
}

Distribution Distribution::lomax(double shape, double scale) {
  Distribution d(Kind::lomax, {shape, scale});
  d.validate();
  return d;
}

Distribution Distribution::piecewise_exponential(std::vector<double> breaks,
                                                 std::vector<double> rates) {
  Distribution d(Kind::piecewise_exponential, std::move(rates));
  d.breaks_ = std::move(breaks);
  d.validate();
  return d;
}

Distribution Distribution::piecewise_weibull(std::vector<double> breaks,
                                             std::vector<double> pieces) {
  Distribution d(Kind::piecewise_weibull, std::move(pieces));
  d.breaks_ = std::move(breaks);
  d.validate();
  return d;
}

Distribution Distribution::minimum(Distribution a, Distribution b) {
  Distribution d(Kind::minimum, {});
  d.children_ = {std::move(a), std::move(b)};
  return d;
}

Distribution Distribution::never() { return Distribution(Kind::never, {}); }

Distribution Distribution::point(double value) {
  Distribution d(Kind::point, {value});
  d.validate();
  return d;
}

void Distribution::validate() const {
  const auto positive = [&](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw ValidationError(ErrorCode::invalid_argument,
                            std::string("distribution: ") + what + " must be positive and finite");
  };
  switch (kind_) {
    case Kind::exponential:
      positive(params_[0], "rate");
      break;
    case Kind::weibull:
    case Kind::log_logistic:
    case Kind::lomax:
      positive(params_[0], "shape");
      positive(params_[1], "scale");
      break;
    case Kind::log_normal:
      if (!std::isfinite(params_[0]))
        throw ValidationError(ErrorCode::invalid_argument, "distribution: mu must be finite");
      positive(params_[1], "sigma");
      break;
    case Kind::uniform:
      if (!(params_[0] >= 0.0 && params_[0] < params_[1] && std::isfinite(params_[1])))
        throw ValidationError(ErrorCode::invalid_argument, "distribution: need 0 <= a < b");
      break;
    case Kind::point:
      if (!(params_[0] >= 0.0))
        throw ValidationError(ErrorCode::invalid_argument, "distribution: point must be >= 0");
      break;
    case Kind::piecewise_exponential:
    case Kind::piecewise_weibull: {
      const std::size_t per = kind_ == Kind::piecewise_weibull ? 2 : 1;
      if (params_.size() != per * (breaks_.size() + 1))
        throw ValidationError(ErrorCode::invalid_argument,
                              "distribution: need one piece more than breakpoints");
      for (std::size_t i = 0; i < breaks_.size(); ++i)
        if (!(breaks_[i] > (i == 0 ? 0.0 : breaks_[i - 1])) || !std::isfinite(breaks_[i]))
          throw ValidationError(ErrorCode::invalid_argument,
                                "distribution: breakpoints must be positive and increasing");
      for (double p : params_) positive(p, "piece parameter");
      break;
    }
    case Kind::minimum:
    case Kind::never:
      break;
  }
}

double Distribution::cumulative_hazard(double t) const {
  if (t <= 0.0) return 0.0;
  double h = 0.0;
  double start = 0.0;
  for (std::size_t i = 0; i <= breaks_.size(); ++i) {
    const double end = i < breaks_.size() ? breaks_[i] : kInf;
    const double stop = std::min(t, end);
    if (kind_ == Kind::piecewise_exponential) {
      h += params_[i] * (stop - start);
    } else {
      const double k = params_[2 * i];
      const double s = params_[2 * i + 1];
      h += std::pow(stop / s, k) - std::pow(start / s, k);
    }
    if (t <= end) break;
    start = end;
  }
  return h;
}

double Distribution::invert_hazard(double target) const {
  double h = 0.0;
  double start = 0.0;
  for (std::size_t i = 0; i <= breaks_.size(); ++i) {
    const double end = i < breaks_.size() ? breaks_[i] : kInf;
    if (kind_ == Kind::piecewise_exponential) {
      const double rate = params_[i];
      const double seg = std::isinf(end) ? kInf : rate * (end - start);
      if (h + seg >= target) return start + (target - h) / rate;
      h += seg;
    } else {
      const double k = params_[2 * i];
      const double s = params_[2 * i + 1];
      const double base = std::pow(start / s, k);
      const double seg = std::isinf(end) ? kInf : std::pow(end / s, k) - base;
      if (h + seg >= target) return s * std::pow(target - h + base, 1.0 / k);
      h += seg;
    }
    start = end;
  }
  return kInf;
}

double Distribution::sample(RandomStream& rng) const {
  switch (kind_) {
    case Kind::exponential:
      return -std::log(rng.uniform_open()) / params_[0];
    case Kind::weibull:
      return params_[1] * std::pow(-std::log(rng.uniform_open()), 1.0 / params_[0]);
    case Kind::log_logistic: {
      const double u = rng.uniform_open();
      return params_[1] * std::pow((1.0 - u) / u, 1.0 / params_[0]);
    }
    case Kind::log_normal:
      return std::exp(params_[0] + params_[1] * normal_quantile(rng.uniform_open()));
    case Kind::uniform:
      return params_[0] + (params_[1] - params_[0]) * rng.uniform();
    case Kind::lomax:
      return params_[1] * (std::pow(rng.uniform_open(), -1.0 / params_[0]) - 1.0);
    case Kind::piecewise_exponential:
    case Kind::piecewise_weibull:
      return invert_hazard(-std::log(rng.uniform_open()));
    case Kind::minimum: {
      const double a = children_[0].sample(rng);
      const double b = children_[1].sample(rng);
      return std::min(a, b);
    }
    case Kind::never:
      return kInf;
    case Kind::point:
      return params_[0];
  }
  return kInf;
}

double Distribution::survival(double t) const {
  if (t < 0.0) return 1.0;
  switch (kind_) {
    case Kind::exponential:
      return std::exp(-params_[0] * t);
    case Kind::weibull:
      return std::exp(-std::pow(t / params_[1], params_[0]));
    case Kind::log_logistic:
      return 1.0 / (1.0 + std::pow(t / params_[1], params_[0]));
    case Kind::log_normal:
      return t <= 0.0 ? 1.0 : normal_sf((std::log(t) - params_[0]) / params_[1]);
    case Kind::uniform:
      return std::clamp((params_[1] - t) / (params_[1] - params_[0]), 0.0, 1.0);
    case Kind::lomax:
      return std::pow(1.0 + t / params_[1], -params_[0]);
    case Kind::piecewise_exponential:
    case Kind::piecewise_weibull:
      return std::exp(-cumulative_hazard(t));
    case Kind::minimum:
      return children_[0].survival(t) * children_[1].survival(t);
    case Kind::never:
      return 1.0;
    case Kind::point:
      return t < params_[0] ? 1.0 : 0.0;
  }
  return 1.0;
}

std::string Distribution::to_string() const {
  const auto pair = [&](const char* name) {
    return std::string(name) + "(" + join(params_, 0, params_.size()) + ")";
  };
  switch (kind_) {
    case Kind::exponential: return pair("exp");
    case Kind::weibull: return pair("weibull");
    case Kind::log_logistic: return pair("loglogistic");
    case Kind::log_normal: return pair("lognormal");
    case Kind::uniform: return pair("unif");
    case Kind::lomax: return pair("lomax");
    case Kind::point: return pair("point");
    case Kind::never: return "never";
    case Kind::minimum:
      return "min(" + children_[0].to_string() + "," + children_[1].to_string() + ")";
    case Kind::piecewise_exponential:
      return "pwexp(" + join(breaks_, 0, breaks_.size()) + ";" + join(params_, 0, params_.size()) +
             ")";
    case Kind::piecewise_weibull: {
      std::string out = "pwweibull(" + join(breaks_, 0, breaks_.size());
      for (std::size_t i = 0; i < params_.size(); i += 2) out += ";" + join(params_, i, i + 2);
      return out + ")";
    }
  }
  return "never";
}

}  // namespace konp
