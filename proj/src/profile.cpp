#include "roughembed/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roughembed/error.hpp"

namespace roughembed {

namespace {

void require_params(const ClosedForm& f, std::size_t n) {
  if (f.params.size() < n) {
    throw ParameterError("closed form '" + f.name() + "' needs " + std::to_string(n) +
                         " parameters");
  }
}

bool in_unit_cube(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

}  // namespace

double ClosedForm::operator()(std::span<const double> x) const {
  const double x1 = x.empty() ? 0.0 : x[0];
  switch (kind) {
    case ClosedFormKind::constant:
      require_params(*this, 1);
      return params[0];
    case ClosedFormKind::linear: {
      require_params(*this, 1 + x.size());
      double v = params[0];
      for (std::size_t i = 0; i < x.size(); ++i) v += params[i + 1] * x[i];
      return v;
    }
    case ClosedFormKind::xsin: {
      require_params(*this, 3);
      const double t = params[0] + x1 * (params[1] - params[0]);
      return t == 0.0 ? 0.0 : params[2] * t * std::sin(1.0 / t);
    }
    case ClosedFormKind::sine:
      require_params(*this, 3);
      return params[0] * std::sin(2.0 * std::numbers::pi * params[1] * x1 + params[2]);
  }
  return 0.0;
}

double ClosedForm::bound(int base_dim) const {
  switch (kind) {
    case ClosedFormKind::constant:
      require_params(*this, 1);
      return std::abs(params[0]);
    case ClosedFormKind::linear: {
      require_params(*this, 1 + static_cast<std::size_t>(base_dim));
      double hi = params[0], lo = params[0];
      for (int i = 0; i < base_dim; ++i) {
        hi += std::max(params[i + 1], 0.0);
        lo += std::min(params[i + 1], 0.0);
      }
      return std::max(std::abs(hi), std::abs(lo));
    }
    case ClosedFormKind::xsin:
      require_params(*this, 3);
      return std::abs(params[2]) * std::max(std::abs(params[0]), std::abs(params[1]));
    case ClosedFormKind::sine:
      require_params(*this, 3);
      return std::abs(params[0]);
  }
  return 0.0;
}

std::string ClosedForm::name() const {
  switch (kind) {
    case ClosedFormKind::constant: return "constant";
    case ClosedFormKind::linear: return "linear";
    case ClosedFormKind::xsin: return "xsin";
    case ClosedFormKind::sine: return "sine";
  }
  return "?";
}

ProfileFunction ProfileFunction::closed_form(int base_dim, ClosedForm rule,
                                             std::optional<double> bound) {
  if (base_dim < 0) throw ParameterError("base_dim must be nonnegative");
  if (base_dim == 0 && rule.kind != ClosedFormKind::constant) {
    throw ParameterError("a zero-dimensional base only admits a constant profile");
  }
  const double m = bound.value_or(rule.bound(base_dim));
  return ProfileFunction(base_dim, ClosedFormRep{std::move(rule)}, m);
}

ProfileFunction ProfileFunction::piecewise_jump(std::vector<double> breaks,
                                                std::vector<ClosedForm> pieces, bool countable) {
  if (pieces.size() != breaks.size() + 1) {
    throw ParameterError("piecewise profile needs breaks.size() + 1 pieces");
  }
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(breaks[i] > 0.0 && breaks[i] < 1.0)) {
      throw ParameterError("breakpoints must lie in the open unit interval");
    }
    if (i > 0 && !(breaks[i] > breaks[i - 1])) {
      throw ParameterError("breakpoints must be strictly increasing");
    }
  }
  double m = 0.0;
  for (const auto& p : pieces) m = std::max(m, p.bound(1));
  return ProfileFunction(1, PiecewiseJumpRep{std::move(breaks), std::move(pieces), countable}, m);
}

ProfileFunction ProfileFunction::step(std::vector<double> breaks, std::vector<double> values) {
  std::vector<ClosedForm> pieces;
  pieces.reserve(values.size());
  for (double v : values) pieces.push_back(ClosedForm::constant(v));
  return piecewise_jump(std::move(breaks), std::move(pieces));
}

ProfileFunction ProfileFunction::sampled(std::vector<int> knots, std::vector<double> values) {
  if (knots.empty()) throw ParameterError("sampled profile needs at least one axis");
  std::size_t total = 1;
  for (int k : knots) {
    if (k < 2) throw ParameterError("sampled profile needs at least 2 knots per axis");
    total *= static_cast<std::size_t>(k);
  }
  if (values.size() != total) throw ParameterError("sampled profile value count mismatch");
  double m = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  }
  const int dim = static_cast<int>(knots.size());
  return ProfileFunction(dim, SampledRep{std::move(knots), std::move(values)}, m);
}

ProfileFunction ProfileFunction::accumulating_jumps(int k_max) {
  if (k_max < 1) throw ParameterError("k_max must be positive");
  // Left of 1/2 the profile is 0; on (x_k, x_{k-1}) it equals 2^{1-k}, so the
  // jump at x_k is 2^{-k}. The piece (1/2, x_{k_max}) carries the truncated
  // tail 2^{-k_max}, the only trace of the cut-off.
  std::vector<double> breaks;
  std::vector<ClosedForm> pieces;
  breaks.push_back(0.5);
  pieces.push_back(ClosedForm::constant(0.0));
  pieces.push_back(ClosedForm::constant(std::ldexp(1.0, -k_max)));
  for (int k = k_max; k >= 1; --k) {
    breaks.push_back(0.5 + std::ldexp(1.0, -k - 2));
    pieces.push_back(ClosedForm::constant(std::ldexp(1.0, 1 - k)));
  }
  return piecewise_jump(std::move(breaks), std::move(pieces), /*countable=*/true);
}

double ProfileFunction::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != base_dim_) {
    throw DomainError("profile point has dimension " + std::to_string(x.size()) + ", expected " +
                      std::to_string(base_dim_));
  }
  if (!in_unit_cube(x)) throw DomainError("profile point outside the base cube");

  return std::visit(
      [&](const auto& rep) -> double {
        using R = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<R, ClosedFormRep>) {
          return rep.rule(x);
        } else if constexpr (std::is_same_v<R, PiecewiseJumpRep>) {
          // upper_bound: a point sitting on a breakpoint belongs to the piece on its right.
          const auto it = std::upper_bound(rep.breaks.begin(), rep.breaks.end(), x[0]);
          return rep.pieces[static_cast<std::size_t>(it - rep.breaks.begin())](x);
        } else {
          // Multilinear interpolation over the knot lattice.
          const std::size_t d = rep.knots.size();
          std::vector<std::size_t> base(d);
          std::vector<double> frac(d);
          for (std::size_t a = 0; a < d; ++a) {
            const double pos = x[a] * (rep.knots[a] - 1);
            auto i = static_cast<std::size_t>(std::floor(pos));
            i = std::min<std::size_t>(i, static_cast<std::size_t>(rep.knots[a] - 2));
            base[a] = i;
            frac[a] = pos - static_cast<double>(i);
          }
          double acc = 0.0;
          for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
            double w = 1.0;
            std::size_t flat = 0, stride = 1;
            for (std::size_t a = 0; a < d; ++a) {
              const bool up = (corner >> a) & 1U;
              w *= up ? frac[a] : 1.0 - frac[a];
              flat += (base[a] + (up ? 1 : 0)) * stride;
              stride *= static_cast<std::size_t>(rep.knots[a]);
            }
            if (w != 0.0) acc += w * rep.values[flat];
          }
          return acc;
        }
      },
      rep_);
}

std::pair<double, double> ProfileFunction::one_sided_limits(double x0) const {
  if (base_dim_ != 1) {
    throw UnsupportedRepresentation("one-sided limits need a one-dimensional base");
  }
  if (!(x0 > 0.0 && x0 < 1.0)) throw DomainError("limit point must lie in (0,1)");

  if (const auto* pw = std::get_if<PiecewiseJumpRep>(&rep_)) {
    const auto it = std::lower_bound(pw->breaks.begin(), pw->breaks.end(), x0);
    const auto i = static_cast<std::size_t>(it - pw->breaks.begin());
    const double arg[1] = {x0};
    if (it != pw->breaks.end() && *it == x0) return {pw->pieces[i](arg), pw->pieces[i + 1](arg)};
    return {pw->pieces[i](arg), pw->pieces[i](arg)};
  }
  if (std::holds_alternative<SampledRep>(rep_)) {
    const double v = evaluate(x0);
    return {v, v};
  }

  // Closed form: shrink windows 1e-3 .. 1e-8 and Richardson-extrapolate the
  // first-order term away; the last two extrapolants must agree.
  constexpr double kAgreement = 1e-7;
  auto limit_from = [&](double sign) {
    std::vector<double> v;
    for (int j = 3; j <= 8; ++j) {
      const double w = std::pow(10.0, -j);
      v.push_back(evaluate(std::clamp(x0 + sign * w, 0.0, 1.0)));
    }
    std::vector<double> r;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) r.push_back((10.0 * v[j + 1] - v[j]) / 9.0);
    const double last = r.back(), prev = r[r.size() - 2];
    if (std::abs(last - prev) > kAgreement) {
      throw DomainError("one-sided limit did not settle at x0 = " + std::to_string(x0));
    }
    return last;
  };
  return {limit_from(-1.0), limit_from(+1.0)};
}

std::vector<JumpSpec> ProfileFunction::jumps() const {
  std::vector<JumpSpec> out;
  if (const auto* pw = std::get_if<PiecewiseJumpRep>(&rep_)) {
    for (std::size_t i = 0; i < pw->breaks.size(); ++i) {
      const double arg[1] = {pw->breaks[i]};
      out.push_back({pw->breaks[i], pw->pieces[i](arg), pw->pieces[i + 1](arg)});
    }
  }
  return out;
}

std::vector<double> ProfileFunction::piece_lengths() const {
  std::vector<double> out;
  if (const auto* pw = std::get_if<PiecewiseJumpRep>(&rep_)) {
    double left = 0.0;
    for (double b : pw->breaks) {
      out.push_back(b - left);
      left = b;
    }
    out.push_back(1.0 - left);
  } else {
    out.push_back(1.0);
  }
  return out;
}

AdmissibilityReport ProfileFunction::admissibility_report(std::size_t samples_per_axis) const {
  if (const auto* s = std::get_if<SampledRep>(&rep_)) {
    for (double v : s->values) {
      if (!std::isfinite(v)) throw InvalidData("sampled profile contains a non-finite value");
    }
  }
  AdmissibilityReport report;
  report.bound = bound_;

  // Dense lattice sweep; capped so that base_dim > 2 stays cheap.
  const int d = base_dim_;
  std::size_t per_axis = samples_per_axis;
  if (d >= 2) per_axis = std::min<std::size_t>(per_axis, 201);
  if (d >= 3) per_axis = std::min<std::size_t>(per_axis, 41);
  double sup = 0.0;
  if (d == 0) {
    sup = std::abs(evaluate(std::span<const double>{}));
  } else {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    while (true) {
      for (int a = 0; a < d; ++a) {
        x[static_cast<std::size_t>(a)] =
            static_cast<double>(idx[static_cast<std::size_t>(a)]) / static_cast<double>(per_axis - 1);
      }
      sup = std::max(sup, std::abs(evaluate(x)));
      int a = 0;
      while (a < d && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
      if (a == d) break;
    }
  }
  report.sampled_sup = sup;
  report.bounded = std::isfinite(sup) && sup <= bound_ * (1.0 + 1e-12) + 1e-300;

  const auto js = jumps();
  for (const auto& j : js) report.max_jump = std::max(report.max_jump, std::abs(j.right_limit - j.left_limit));
  const auto* pw = std::get_if<PiecewiseJumpRep>(&rep_);
  if (pw != nullptr && pw->countable) {
    report.jump_count.reset();
  } else {
    report.jump_count = js.size();
  }
  return report;
}

}  // namespace roughembed
