#pragma once

#include "octacomp/graphcmp.hpp"
#include "octacomp/metric.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace octacomp {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix<double> vectors;      // column k belongs to values[k]
};

/// Cyclic Jacobi rotations. Throws NotSymmetric when |m_ij - m_ji| exceeds
/// 1e-12 relative to the largest entry.
SymmetricEigen symmetric_eigen(const Matrix<double>& m);

/// Frobenius-nearest positive semidefinite matrix (negative eigenvalues
/// clipped to zero).
Matrix<double> psd_project(const Matrix<double>& m);

/// Double-centered Gram matrix -J D^2 J / 2 of a squared distance matrix.
Matrix<double> centered_gram(const Matrix<double>& squared);

/// Rows of V sqrt(L), keeping eigenvalues above cutoff * trace. At least one
/// column is always returned.
std::vector<std::vector<double>> gram_coordinates(const Matrix<double>& gram, double cutoff);

enum class Verdict { Feasible, Infeasible, Undecided };

std::string to_string(Verdict v);

struct FeasibilityOptions {
  double tol = kDefaultTol;           // constraint residual and verification tolerance
  std::size_t max_iter = 50'000;
  double infeas_threshold = 1e-6;     // on distances scaled to a unit maximum
  std::size_t window = 500;           // iterations the gap must stay put
  double rank_cutoff = 1e-10;         // relative to the Gram trace
};

struct FeasibilityReport {
  Verdict verdict = Verdict::Undecided;
  std::optional<ModelConfiguration<double>> model;  // Feasible only
  std::optional<VerificationReport> verification;   // Feasible only
  double max_violation = 0.0;  // worst constraint excess in distance units
  double residual = 0.0;       // gap between the constraint and PSD iterates
  std::size_t iterations = 0;
};

/// Dykstra projections between the PSD cone and the constraint half-spaces.
/// A Feasible verdict always carries a model that passed verify_model.
FeasibilityReport check_constraints(const ConstraintSet<double>& constraints,
                                    const FeasibilityOptions& opts = {});

/// `labeling[v]` names the point placed at graph vertex v.
FeasibilityReport check_comparison(const ComparisonGraph& graph, const FiniteMetricSpace<double>& space,
                                   const std::vector<std::string>& labeling,
                                   const FeasibilityOptions& opts = {});

FeasibilityReport check_comparison(const ComparisonGraph& graph, const FiniteMetricSpace<double>& space,
                                   const FeasibilityOptions& opts = {});

struct C4Check {
  std::array<std::string, 4> cycle;  // cycle order; (0,2) and (1,3) are the diagonals
  FeasibilityReport report;
};

struct C4Summary {
  std::vector<C4Check> checks;  // 15 subsets x 3 pairings
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  std::size_t undecided = 0;
  bool all_feasible() const { return feasible == checks.size(); }
};

/// Every labeled 4-cycle on every four-point subset. Throws WrongPointCount
/// unless the space has six points.
C4Summary check_all_c4_sublabelings(const FiniteMetricSpace<double>& space,
                                    const FeasibilityOptions& opts = {});

/// The 15 perfect matchings of six roles, each given as a role order whose
/// partner pairs (r, r + 3) are the matching.
std::vector<std::array<std::size_t, 6>> perfect_matchings_of_six();

}  // namespace octacomp
