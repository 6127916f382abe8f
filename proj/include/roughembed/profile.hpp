#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace roughembed {

/// Named closed-form profile rules. Parameters per kind:
///   constant: [c]
///   linear:   [c0, g1, ..., g_d]           c0 + sum g_i x_i
///   xsin:     [x_lo, x_hi, scale]          scale * x sin(1/x), x = x_lo + x1 (x_hi - x_lo), 0 at x = 0
///   sine:     [amp, freq, phase]           amp * sin(2 pi freq x1 + phase)
enum class ClosedFormKind { constant, linear, xsin, sine };

struct ClosedForm {
  ClosedFormKind kind = ClosedFormKind::constant;
  std::vector<double> params{0.0};

  static ClosedForm constant(double c) { return {ClosedFormKind::constant, {c}}; }
  static ClosedForm xsin(double x_lo = 0.0, double x_hi = 1.0, double scale = 1.0) {
    return {ClosedFormKind::xsin, {x_lo, x_hi, scale}};
  }
  static ClosedForm sine(double amp, double freq, double phase = 0.0) {
    return {ClosedFormKind::sine, {amp, freq, phase}};
  }

  double operator()(std::span<const double> x) const;
  /// Upper bound for |f| over the unit cube of dimension `base_dim`.
  double bound(int base_dim) const;
  std::string name() const;
};

struct JumpSpec {
  double location;
  double left_limit;
  double right_limit;
};

struct AdmissibilityReport {
  bool bounded = false;
  /// Number of jumps; empty when the jump set is countably infinite.
  std::optional<std::size_t> jump_count;
  double max_jump = 0.0;
  double bound = 0.0;
  double sampled_sup = 0.0;

  bool countable() const { return !jump_count.has_value(); }
};

/// Bounded boundary profile f over the closed base cube [0,1]^base_dim.
/// Immutable once built.
class ProfileFunction {
 public:
  struct ClosedFormRep {
    ClosedForm rule;
  };
  struct PiecewiseJumpRep {
    std::vector<double> breaks;      // strictly increasing, inside (0,1)
    std::vector<ClosedForm> pieces;  // breaks.size() + 1 pieces
    bool countable = false;          // finite truncation of an accumulating sequence
  };
  struct SampledRep {
    std::vector<int> knots;      // knots per axis, uniform over [0,1]
    std::vector<double> values;  // axis 0 fastest
  };
  using Representation = std::variant<ClosedFormRep, PiecewiseJumpRep, SampledRep>;

  static ProfileFunction closed_form(int base_dim, ClosedForm rule,
                                     std::optional<double> bound = std::nullopt);
  static ProfileFunction piecewise_jump(std::vector<double> breaks, std::vector<ClosedForm> pieces,
                                        bool countable = false);
  /// Piecewise-constant profile: values.size() == breaks.size() + 1.
  static ProfileFunction step(std::vector<double> breaks, std::vector<double> values);
  static ProfileFunction sampled(std::vector<int> knots, std::vector<double> values);
  static ProfileFunction sampled_1d(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return sampled({n}, std::move(values));
  }
  /// Jumps of size 2^-k at x_k = 1/2 + 2^-(k+2), k = 1..k_max, accumulating at 1/2;
  /// zero left of 1/2. Reported as a countable jump set.
  static ProfileFunction accumulating_jumps(int k_max = 40);

  int base_dim() const { return base_dim_; }
  double bound() const { return bound_; }
  const Representation& representation() const { return rep_; }

  double evaluate(std::span<const double> x) const;
  double evaluate(double x) const { return evaluate(std::span<const double>(&x, 1)); }

  /// (left, right) limits at x0 in (0,1). Only base_dim == 1.
  std::pair<double, double> one_sided_limits(double x0) const;

  std::vector<JumpSpec> jumps() const;
  /// Lengths of the pieces of a piecewise_jump profile, left to right.
  std::vector<double> piece_lengths() const;

  AdmissibilityReport admissibility_report(std::size_t samples_per_axis = 2001) const;

 private:
  ProfileFunction(int base_dim, Representation rep, double bound)
      : base_dim_(base_dim), rep_(std::move(rep)), bound_(bound) {}

  int base_dim_ = 1;
  Representation rep_;
  double bound_ = 0.0;
};

}  // namespace roughembed
