#include "roughembed/spectrum.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "roughembed/error.hpp"

namespace roughembed {

DiscreteForms assemble(const GridMask& mask, bool allow_disconnected) {
  if (mask.empty()) throw DegenerateDomain("cannot assemble forms on an empty mask");
  if (!allow_disconnected) {
    const ComponentLabels labels = label_components(mask);
    if (labels.sizes.size() > 1) {
      std::ostringstream os;
      os << "mask has " << labels.sizes.size() << " components (sizes";
      for (std::size_t i = 0; i < std::min<std::size_t>(labels.sizes.size(), 12); ++i) os << ' ' << labels.sizes[i];
      if (labels.sizes.size() > 12) os << " ...";
      os << ")";
      throw TopologyError(os.str());
    }
  }
  const Grid& g = mask.grid();
  const int n = g.dim();
  const auto count = static_cast<Eigen::Index>(mask.count());
  const double weight = std::pow(g.spacing, n - 2);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(2 * n + 1));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(count);
  for (Eigen::Index c = 0; c < count; ++c) {
    const std::size_t flat = mask.included()[static_cast<std::size_t>(c)];
    for (int a = 0; a < n; ++a) {
      if (g.coordinate(flat, a) + 1 >= g.dims[static_cast<std::size_t>(a)]) continue;
      const std::int64_t nb = mask.compact_index(flat + g.stride(a));
      if (nb < 0) continue;
      trip.emplace_back(c, nb, -weight);
      trip.emplace_back(nb, c, -weight);
      diag[c] += weight;
      diag[nb] += weight;
    }
  }
  for (Eigen::Index c = 0; c < count; ++c) trip.emplace_back(c, c, diag[c]);
  DiscreteForms f{mask, SparseMat(count, count), Eigen::VectorXd::Constant(count, g.cell_volume())};
  f.stiffness.setFromTriplets(trip.begin(), trip.end());
  f.stiffness.makeCompressed();
  return f;
}

namespace {

using Dense = Eigen::MatrixXd;

/// Orthonormal basis of span(S) (Euclidean), dropping near-dependent directions.
/// Returns the coefficient matrix Z with S Z orthonormal.
Dense orthonormalizer(const Dense& s) {
  const Dense gram = s.transpose() * s;
  Eigen::VectorXd d = gram.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Dense scaled = d.asDiagonal() * gram * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Dense> es(scaled);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = 1e-12 * ev.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cut) keep.push_back(i);
  }
  Dense z(s.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    z.col(static_cast<Eigen::Index>(j)) = d.asDiagonal() * es.eigenvectors().col(keep[j]) / std::sqrt(ev[keep[j]]);
  }
  return z;
}

SpectrumReport dense_solve(const DiscreteForms& forms, int k, const EigenOptions& opt) {
  const Eigen::VectorXd dinv = forms.mass.cwiseSqrt().cwiseInverse();
  const Dense a = dinv.asDiagonal() * Dense(forms.stiffness) * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Dense> es(a);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
  SpectrumReport r;
  r.method = "dense";
  r.eigenvalues = es.eigenvalues().head(k);
  r.eigenvectors = dinv.asDiagonal() * es.eigenvectors().leftCols(k);
  r.residuals.resize(k);
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd y = es.eigenvectors().col(j);
    r.residuals[j] = (a * y - r.eigenvalues[j] * y).norm();
  }
  r.iterations = 1;
  r.solver_tolerance = opt.tol;
  return r;
}

SpectrumReport solve(const DiscreteForms& forms, int k, const EigenOptions& opt);

}  // namespace

SpectrumReport lowest_eigenvalues(const DiscreteForms& forms, int k, const EigenOptions& opt) {
  if (k < 2 || k > static_cast<int>(forms.mask.count())) throw ParameterError("need 2 <= k <= cell count");
  return solve(forms, k, opt);
}

namespace {

SpectrumReport solve(const DiscreteForms& forms, int k, const EigenOptions& opt) {
  const auto n = static_cast<Eigen::Index>(forms.mask.count());
  if (k < 1 || k > n) throw ParameterError("need 1 <= k <= cell count");
  if (!(opt.tol > 0.0)) throw ParameterError("solver tolerance must be positive");
  const int m = std::min<int>(k + std::max(opt.guard, 1), static_cast<int>(n));

  SpectrumReport r;
  if (static_cast<std::size_t>(n) <= opt.dense_limit || 3 * m >= n) {
    r = dense_solve(forms, k, opt);
  } else {
    r.method = "lobpcg";
    r.solver_tolerance = opt.tol;
    // Work with y = M^{1/2} x, so the problem is standard: A = M^{-1/2} K M^{-1/2}.
    const Eigen::VectorXd dsqrt = forms.mass.cwiseSqrt();
    const Eigen::VectorXd dinv = dsqrt.cwiseInverse();
    const SparseMat a = dinv.asDiagonal() * forms.stiffness * dinv.asDiagonal();

    const BoundingBox box{forms.mask.grid().origin,
                          forms.mask.grid().origin +
                              forms.mask.grid().spacing *
                                  Eigen::Map<const Eigen::VectorXi>(forms.mask.grid().dims.data(),
                                                                    forms.mask.grid().dim())
                                      .cast<double>()};
    const double sigma = 1.0 / std::pow(box.diameter(), 2);
    SparseMat shifted = forms.stiffness;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma * forms.mass[i];
    Eigen::SimplicialLDLT<SparseMat> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw SolverError("preconditioner factorisation failed");
    auto precondition = [&](const Dense& res) -> Dense {
      Dense rhs = dsqrt.asDiagonal() * res;
      return dsqrt.asDiagonal() * ldlt.solve(rhs);
    };

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Dense y(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) y(i, j) = normal(rng);
    }
    y = Dense(Eigen::HouseholderQR<Dense>(y).householderQ() * Dense::Identity(n, m));
    Dense ay = a * y;
    {
      Eigen::SelfAdjointEigenSolver<Dense> es(y.transpose() * ay);
      y = y * es.eigenvectors();
      ay = ay * es.eigenvectors();
    }
    Eigen::VectorXd lambda = (y.transpose() * ay).diagonal();
    Dense p;
    const int budget = opt.max_iterations > 0 ? opt.max_iterations : 50 * k;
    std::vector<double> history;
    Eigen::VectorXd res(m);
    int it = 0;
    for (;; ++it) {
      const Dense rmat = ay - y * lambda.asDiagonal();
      double worst = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) res[j] = rmat.col(j).norm();
      for (int j = 0; j < k; ++j) worst = std::max(worst, res[j] / (1.0 + std::abs(lambda[j])));
      history.push_back(worst);
      if (worst <= opt.tol) break;
      if (it >= budget) {
        std::ostringstream os;
        os << "LOBPCG did not converge in " << budget << " iterations; residual history";
        const std::size_t from = history.size() > 8 ? history.size() - 8 : 0;
        for (std::size_t i = from; i < history.size(); ++i) os << ' ' << history[i];
        throw SolverError(os.str());
      }
      const Dense w = precondition(rmat);
      const Eigen::Index pc = p.cols();
      Dense s(n, m + w.cols() + pc);
      s << y, w, p;
      const Dense z = orthonormalizer(s);
      const Dense q = s * z;
      const Dense aq = a * q;
      Dense h = q.transpose() * aq;
      h = 0.5 * (h + h.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Dense> es(h);
      const Dense c = es.eigenvectors().leftCols(m);
      const Dense ynew = q * c;
      p = ynew - y * (y.transpose() * ynew);
      y = ynew;
      ay = aq * c;
      lambda = es.eigenvalues().head(m);
    }
    r.iterations = it;
    r.eigenvalues = lambda.head(k);
    r.residuals = res.head(k);
    r.eigenvectors = dinv.asDiagonal() * y.leftCols(k);
  }
  r.singular_values = (1.0 + r.eigenvalues.array().max(0.0)).rsqrt().matrix();
  r.resolution = forms.mask.cells_per_unit();
  r.cell_count = forms.mask.count();
  return r;
}

}  // namespace

SpectrumReport mask_spectrum(const GridMask& mask, int k, const MaskSpectrumOptions& options) {
  if (mask.empty()) throw DegenerateDomain("cannot compute a spectrum on an empty mask");
  if (k < 2) throw ParameterError("need k >= 2");
  const ComponentLabels labels = label_components(mask);
  const double threshold =
      std::max(static_cast<double>(options.debris_min), options.debris_fraction * static_cast<double>(mask.count()));
  std::vector<int> kept;
  std::size_t dropped = 0;
  for (std::size_t id = 0; id < labels.sizes.size(); ++id) {
    if (id == 0 || static_cast<double>(labels.sizes[id]) >= threshold) {
      kept.push_back(static_cast<int>(id));
    } else {
      dropped += labels.sizes[id];
    }
  }
  if (kept.size() > 1 && !options.per_component) {
    return solve(assemble(mask), k, options.eigen);  // raises TopologyError
  }

  SpectrumReport merged;
  if (kept.size() == 1) {
    const GridMask main = dropped ? component_mask(mask, labels, 0) : mask;
    merged = solve(assemble(main, true), std::min<int>(k, static_cast<int>(main.count())), options.eigen);
  } else {
    struct Pair {
      double lambda, residual;
    };
    std::vector<Pair> pairs;
    std::size_t cells = 0;
    for (int id : kept) {
      const GridMask part = component_mask(mask, labels, id);
      const SpectrumReport s =
          solve(assemble(part, true), std::min<int>(k, static_cast<int>(part.count())), options.eigen);
      for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) pairs.push_back({s.eigenvalues[j], s.residuals[j]});
      merged.iterations = std::max(merged.iterations, s.iterations);
      merged.method = s.method;
      cells += part.count();
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.lambda < b.lambda; });
    const auto kk = static_cast<Eigen::Index>(std::min<std::size_t>(static_cast<std::size_t>(k), pairs.size()));
    merged.eigenvalues.resize(kk);
    merged.residuals.resize(kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
      merged.eigenvalues[j] = pairs[static_cast<std::size_t>(j)].lambda;
      merged.residuals[j] = pairs[static_cast<std::size_t>(j)].residual;
    }
    merged.singular_values = (1.0 + merged.eigenvalues.array().max(0.0)).rsqrt().matrix();
    merged.solver_tolerance = options.eigen.tol;
    merged.cell_count = cells;
    merged.per_component = true;
  }
  merged.resolution = mask.cells_per_unit();
  merged.component_count = kept.size();
  merged.dropped_cells = dropped;
  return merged;
}

SpectrumReport domain_spectrum(const Domain& d, int cells_per_unit, int k, const MaskSpectrumOptions& options) {
  return mask_spectrum(rasterize(d, cells_per_unit), k, options);
}

// ---------------------------------------------------------------------------

double condition2_slack(const GridFunction& u, const GridMask& shrunk, double a, double b) {
  const double whole = l2_norm_squared(u);
  const double h1 = std::sqrt(whole + dirichlet_energy(u));
  const double inner = std::sqrt(l2_norm_squared(u.restrict_to(shrunk)));
  return a * h1 + b * inner - std::sqrt(whole);
}

Condition2Report condition2_check(const GridMask& mask, const GridMask& shrunk_in, double h, double a, double b,
                                  int trials, std::uint64_t seed, int max_order) {
  if (trials < 1) throw ParameterError("condition-2 check needs at least one trial");
  const GridMask shrunk = shrunk_in.intersect(mask);
  if (shrunk.empty()) throw DegenerateDomain("shrunk mask is empty on this grid");
  Condition2Report r{h, a, b, trials, 0, std::numeric_limits<double>::infinity(), {}};
  r.slacks.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick(1, std::max(1, max_order));
    const TrigPolynomial p = TrigPolynomial::random(mask.grid().dim(), pick(rng), rng);
    const double s = condition2_slack(p.sample(mask), shrunk, a, b);
    r.slacks.push_back(s);
    r.min_slack = std::min(r.min_slack, s);
    if (s < 0.0) ++r.failures;
  }
  return r;
}

Condition2Report condition2_check(const ElementaryDomain& domain, int cells_per_unit, double h, double a, double b,
                                  int trials, std::uint64_t seed, ShrinkMode mode) {
  const GridMask mask = rasterize(domain, cells_per_unit);
  const GridMask shrunk = rasterize_on(domain.shrink(h, mode), mask.grid());
  return condition2_check(mask, shrunk, h, a, b, trials, seed);
}

// ---------------------------------------------------------------------------

namespace {

void require_spd(const Eigen::MatrixXd& n, const char* name) {
  if (n.rows() != n.cols() || n.rows() == 0) throw ParameterError(std::string(name) + " must be square");
  if (!n.allFinite()) throw InvalidData(std::string(name) + " has non-finite entries");
  if ((n - n.transpose()).norm() > 1e-12 * std::max(1.0, n.norm())) {
    throw ParameterError(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (!(ev[0] > 1e-12 * std::max(1.0, ev[ev.size() - 1]))) {
    throw ParameterError(std::string(name) + " is singular or not positive definite");
  }
}

void require_dominates(const Eigen::MatrixXd& big, const Eigen::MatrixXd& small, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big - small, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] < -1e-10 * std::max(1.0, big.norm())) {
    throw ParameterError(std::string("norm ordering fails: ") + what);
  }
}

}  // namespace

NormTriple::NormTriple(Eigen::MatrixXd n1, Eigen::MatrixXd n2, Eigen::MatrixXd n3)
    : n1_(std::move(n1)), n2_(std::move(n2)), n3_(std::move(n3)) {
  if (n1_.rows() != n2_.rows() || n2_.rows() != n3_.rows()) throw ParameterError("forms have different sizes");
  require_spd(n1_, "N1");
  require_spd(n2_, "N2");
  require_spd(n3_, "N3");
  require_dominates(n1_, n2_, "N1 >= N2");
  require_dominates(n2_, n3_, "N2 >= N3");
}

NormTriple NormTriple::euclidean(int d) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  return {id, id, id};
}

int NormTriple::ordering_violations(int trials, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd u(dim());
    for (int i = 0; i < dim(); ++i) u[i] = normal(rng);
    const double a = norm1(u), b = norm2(u), c = norm3(u);
    const double slop = 1e-12 * a;
    if (a + slop < b || b + slop < c) ++bad;
  }
  return bad;
}

std::vector<CEpsilonRow> find_c_epsilon(const NormTriple& triple, const std::vector<double>& eps_list,
                                        const CEpsilonOptions& options) {
  const int d = triple.dim();
  if (d > 200) throw ParameterError("find_c_epsilon supports d <= 200");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw ParameterError("epsilon values must be positive");
  }
  const int starts = options.starts > 0 ? options.starts : (d <= 50 ? 1000 : 200);
  const Eigen::MatrixXd &n1 = triple.n1(), &n2 = triple.n2(), &n3 = triple.n3();

  std::vector<CEpsilonRow> rows;
  for (double eps : eps_list) {
    auto value = [&](const Eigen::VectorXd& u) {
      return (triple.norm2(u) - eps * triple.norm1(u)) / triple.norm3(u);
    };
    auto gradient = [&](const Eigen::VectorXd& u) {
      const Eigen::VectorXd g1 = n1 * u, g2 = n2 * u, g3 = n3 * u;
      const double a = std::sqrt(u.dot(g1)), b = std::sqrt(u.dot(g2)), c = std::sqrt(u.dot(g3));
      const double num = b - eps * a;
      return Eigen::VectorXd(((g2 / b - eps * g1 / a) * c - num * g3 / c) / (c * c));
    };

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double best = 0.0;
    for (int s = 0; s < starts; ++s) {
      Eigen::VectorXd u(d);
      for (int i = 0; i < d; ++i) u[i] = normal(rng);
      u /= triple.norm1(u);
      double f = value(u);
      for (int step = 0; step < options.max_steps; ++step) {
        const Eigen::VectorXd g = gradient(u);
        const double gn = g.norm();
        if (!(gn * u.norm() > 1e-13)) break;
        double t = 0.5 * u.norm() / gn;
        bool moved = false;
        for (int half = 0; half < 40; ++half, t *= 0.5) {
          Eigen::VectorXd v = u + t * g;
          v /= triple.norm1(v);
          const double fv = value(v);
          if (fv > f) {
            moved = fv - f > 1e-15 * std::max(1.0, std::abs(f));
            u = std::move(v);
            f = fv;
            break;
          }
        }
        if (!moved) break;
      }
      best = std::max(best, f);
    }
    rows.push_back({eps, best});
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

void collect_elementary(const Domain& d, const std::string& label, std::vector<std::pair<std::string, ElementaryDomain>>& out) {
  if (const auto* e = std::get_if<ElementaryDomain>(&d)) {
    out.emplace_back(label, *e);
  } else if (const auto* u = std::get_if<UnionDomain>(&d)) {
    for (std::size_t i = 0; i < u->parts().size(); ++i) {
      collect_elementary(u->parts()[i], label + "part" + std::to_string(i) + "/", out);
    }
  }
}

std::string percent(double x) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << 100.0 * x << '%';
  return os.str();
}

}  // namespace

DossierReport compactness_dossier(const Domain& d, const std::string& name, const std::vector<int>& resolutions_in,
                                  const DossierOptions& options) {
  if (resolutions_in.size() < 2) throw ParameterError("the dossier needs at least two resolutions");
  std::vector<int> resolutions = resolutions_in;
  std::sort(resolutions.begin(), resolutions.end());
  DossierReport r;
  r.domain = name;
  for (int res : resolutions) r.spectra.push_back(domain_spectrum(d, res, options.k, options.spectrum));

  const SpectrumReport& coarse = r.spectra[r.spectra.size() - 2];
  const SpectrumReport& fine = r.spectra.back();
  const Eigen::Index kk = std::min(coarse.eigenvalues.size(), fine.eigenvalues.size());
  r.drift = Eigen::VectorXd::Zero(kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    const double diff = std::abs(fine.eigenvalues[j] - coarse.eigenvalues[j]);
    r.drift[j] = j == 0 ? diff : diff / std::max(std::abs(fine.eigenvalues[j]), 1e-300);
    if (j > 0) r.max_drift = std::max(r.max_drift, r.drift[j]);
  }

  std::vector<std::pair<std::string, ElementaryDomain>> elementary;
  collect_elementary(d, "", elementary);
  const double a = 2.0 * options.h, b = std::numbers::sqrt3;
  for (const auto& [label, e] : elementary) {
    r.condition2.push_back(condition2_check(e, resolutions.front(), options.h, a, b, options.condition2_trials,
                                            options.seed, ShrinkMode::vertical_only));
    r.condition2_labels.push_back(label.empty() ? "domain" : label.substr(0, label.size() - 1));
  }

  std::size_t skipped_parts = 0;
  if (options.part_spectra) {
    if (const auto* u = std::get_if<UnionDomain>(&d)) {
      for (std::size_t i = 0; i < u->parts().size(); ++i) {
        const GridMask m = rasterize_on(u->parts()[i], grid_for(bounding_box(u->parts()[i]), resolutions.front()));
        if (m.count() < options.spectrum.debris_min) {
          ++skipped_parts;
          continue;
        }
        r.parts.push_back({"part" + std::to_string(i), mask_spectrum(m, options.k, options.spectrum)});
      }
    }
  }

  std::ostringstream v;
  v << "domain " << name << ": lowest " << kk << " Neumann eigenvalues computed at";
  for (int res : resolutions) v << ' ' << res;
  v << " cells per unit. ";
  v << "Largest relative drift of lambda_2..lambda_" << kk << " between " << coarse.resolution << " and "
    << fine.resolution << " is " << percent(r.max_drift) << ". ";
  if (kk >= 2) {
    v << "Embedding singular values fall from " << fine.singular_values[1] << " (j=2) to "
      << fine.singular_values[kk - 1] << " (j=" << kk << "). ";
  }
  if (r.condition2.empty()) {
    v << "No fibred part is available, so the interpolation inequality was not checked. ";
  } else {
    for (std::size_t i = 0; i < r.condition2.size(); ++i) {
      v << "Interpolation inequality on " << r.condition2_labels[i] << " (h=" << options.h << ", "
        << r.condition2[i].trials << " trials): min slack " << r.condition2[i].min_slack << ". ";
    }
  }
  if (!r.parts.empty()) {
    v << "Per-part spectra computed for " << r.parts.size() << " parts";
    if (skipped_parts) v << " (" << skipped_parts << " parts below resolution skipped)";
    v << ". ";
  }
  v << "These are finite-dimensional measurements; they are consistent with a compact embedding "
       "but do not prove it.";
  r.verdict = v.str();
  return r;
}

}  // namespace roughembed
