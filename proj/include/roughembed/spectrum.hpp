#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roughembed/domain.hpp"
#include "roughembed/inequalities.hpp"

namespace roughembed {

using SparseMat = Eigen::SparseMatrix<double>;

/// Five-point (2n+1 in n-D) Neumann discretization on a mask: stiffness sums
/// (u_i - u_j)^2 h^{n-2} over interior faces, mass is diag(h^n).
struct DiscreteForms {
  GridMask mask;
  SparseMat stiffness;
  Eigen::VectorXd mass;
};

/// Throws TopologyError (listing component sizes) on a disconnected mask unless
/// `allow_disconnected`.
DiscreteForms assemble(const GridMask& mask, bool allow_disconnected = false);

struct EigenOptions {
  double tol = 1e-6;
  std::uint64_t seed = 1;
  int guard = 3;           // extra block columns
  int max_iterations = 0;  // 0: 50 * k sweeps
  std::size_t dense_limit = 400;
};

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;     // ascending
  Eigen::VectorXd singular_values; // (1 + lambda)^{-1/2}
  Eigen::VectorXd residuals;       // mass-weighted, per pair
  int resolution = 0;              // cells per unit
  double solver_tolerance = 0.0;
  int iterations = 0;
  std::string method;
  std::size_t cell_count = 0;
  std::size_t component_count = 1;
  std::size_t dropped_cells = 0;   // cells in discarded debris components
  bool per_component = false;
  Eigen::MatrixXd eigenvectors;    // only for single-component solves
};

/// Lowest k >= 2 generalized eigenpairs of (stiffness, mass). Block LOBPCG
/// preconditioned by a sparse LDLT of K + sigma M; dense solve for small masks.
/// Residual |M^{-1/2}(K - lambda M)v| / |M^{1/2} v| <= tol (1 + lambda) per pair.
SpectrumReport lowest_eigenvalues(const DiscreteForms& forms, int k, const EigenOptions& options = {});

struct MaskSpectrumOptions {
  EigenOptions eigen;
  bool per_component = true;
  double debris_fraction = 1e-3;  // components below max(debris_min, fraction * cells) are dropped
  std::size_t debris_min = 16;
};

/// Spectrum of a mask; disconnected masks are solved per component and merged.
SpectrumReport mask_spectrum(const GridMask& mask, int k, const MaskSpectrumOptions& options = {});
SpectrumReport domain_spectrum(const Domain& d, int cells_per_unit, int k, const MaskSpectrumOptions& options = {});

// ---------------------------------------------------------------------------
// Condition 2

struct Condition2Report {
  double h = 0.0;
  double a = 0.0;
  double b = 0.0;
  int trials = 0;
  int failures = 0;
  double min_slack = 0.0;
  std::vector<double> slacks;
  bool passed(double tolerance = 1e-6) const { return min_slack > -tolerance; }
};

/// a |u|_{H1(D)} + b |u|_{L2(D_h)} - |u|_{L2(D)} for one function.
double condition2_slack(const GridFunction& u, const GridMask& shrunk, double a, double b);

/// Random trig polynomials (order 1..max_order) on `mask`, shrunk mask given.
Condition2Report condition2_check(const GridMask& mask, const GridMask& shrunk, double h, double a, double b,
                                  int trials, std::uint64_t seed = 7, int max_order = 8);
/// Rasterizes D and D_h on one grid first. Throws DegenerateDomain if D_h is empty.
Condition2Report condition2_check(const ElementaryDomain& domain, int cells_per_unit, double h, double a, double b,
                                  int trials, std::uint64_t seed = 7, ShrinkMode mode = ShrinkMode::vertical_only);

// ---------------------------------------------------------------------------
// Finite-dimensional compactness criterion

/// Three SPD forms on R^d with N1 >= N2 >= N3.
class NormTriple {
 public:
  NormTriple(Eigen::MatrixXd n1, Eigen::MatrixXd n2, Eigen::MatrixXd n3);
  static NormTriple euclidean(int d);

  int dim() const { return static_cast<int>(n1_.rows()); }
  const Eigen::MatrixXd& n1() const { return n1_; }
  const Eigen::MatrixXd& n2() const { return n2_; }
  const Eigen::MatrixXd& n3() const { return n3_; }
  double norm1(const Eigen::VectorXd& u) const { return std::sqrt(u.dot(n1_ * u)); }
  double norm2(const Eigen::VectorXd& u) const { return std::sqrt(u.dot(n2_ * u)); }
  double norm3(const Eigen::VectorXd& u) const { return std::sqrt(u.dot(n3_ * u)); }
  /// Number of random vectors (of `trials`) violating |u|_1 >= |u|_2 >= |u|_3.
  int ordering_violations(int trials, std::uint64_t seed = 1) const;

 private:
  Eigen::MatrixXd n1_, n2_, n3_;
};

struct CEpsilonRow {
  double eps = 0.0;
  double c = 0.0;
};

struct CEpsilonOptions {
  int starts = 0;  // 0: 1000 for d <= 50, else 200
  int max_steps = 400;
  std::uint64_t seed = 1;
};

/// c(eps) = max over u of (|u|_2 - eps |u|_1) / |u|_3, clamped at 0, by random
/// starts and projected gradient ascent. Rows follow eps_list order.
std::vector<CEpsilonRow> find_c_epsilon(const NormTriple& triple, const std::vector<double>& eps_list,
                                        const CEpsilonOptions& options = {});

// ---------------------------------------------------------------------------
// Dossier

struct DossierOptions {
  int k = 6;
  MaskSpectrumOptions spectrum;
  double h = 0.1;
  int condition2_trials = 100;
  std::uint64_t seed = 7;
  bool part_spectra = true;
};

struct PartSpectrum {
  std::string label;
  SpectrumReport spectrum;
};

struct DossierReport {
  std::string domain;
  std::vector<SpectrumReport> spectra;  // one per resolution, in the given order
  Eigen::VectorXd drift;                // relative drift of lambda_j between the two finest resolutions (j >= 2)
  double max_drift = 0.0;               // over j >= 2
  std::vector<Condition2Report> condition2;  // one per elementary part
  std::vector<std::string> condition2_labels;
  std::vector<PartSpectrum> parts;
  std::string verdict;
};

DossierReport compactness_dossier(const Domain& d, const std::string& name, const std::vector<int>& resolutions,
                                  const DossierOptions& options = {});

}  // namespace roughembed
