#pragma once

// Laplace-Beltrami spectra of the induced metric on periodic torus meshes.
//
// Bilinear elements on the parameter grid. The stiffness form integrates
// grad_phi^T sqrt(det g) g^{-1} grad_phi and the mass form sqrt(det g) phi phi,
// with both densities interpolated bilinearly from the vertex metric and
// integrated by 2 x 2 Gauss quadrature.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "s3tori/surface.hpp"

namespace s3tori {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Operators {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

// Throws DegenerateImmersionError naming the vertex where the metric is not
// positive definite.
Operators assemble_operators(const SurfaceMesh& mesh);

// Dirichlet energy over mass norm of f after removing its mass-weighted mean.
// Throws DegenerateFunctionError when the projected mass norm is below 1e-14.
double rayleigh_quotient(const Operators& ops, const Eigen::VectorXd& f);
double rayleigh_quotient(const SurfaceMesh& mesh, const Eigen::VectorXd& f);

struct MultiplicityGroup {
  int first = 0;  // index of the first eigenvalue in the group
  int size = 0;
  double mean = 0;
};

// Consecutive eigenvalues within `rel` of the group's first value.
std::vector<MultiplicityGroup> multiplicity_groups(const std::vector<double>& eigenvalues,
                                                   double rel = 0.01);

struct SpectralResult {
  int n_u = 0;
  int n_v = 0;
  std::vector<double> eigenvalues;     // ascending, the first is 0
  Eigen::MatrixXd eigenfunctions;      // one mass-orthonormal column per eigenvalue
  std::vector<double> residuals;       // |K f - lambda M f|_2
  std::vector<MultiplicityGroup> groups;
  int iterations = 0;
};

struct EigenOptions {
  double tolerance = 1e-8;  // relative to |K|_inf
  int max_iterations = 500;
  int guard = 8;            // extra block vectors beyond `count`
  double shift = -1.0;
  std::uint64_t seed = 42;
};

// Block shifted inverse iteration with Rayleigh-Ritz on (K, M). Throws
// std::invalid_argument unless 2 <= count < vertex count, ConvergenceError
// (with the achieved residual) after max_iterations.
SpectralResult first_eigenpairs(const SurfaceMesh& mesh, int count, const EigenOptions& opt = {});
SpectralResult first_eigenpairs(const Operators& ops, int n_u, int n_v, int count,
                                const EigenOptions& opt = {});

// max over the four ambient coordinates of |(K - 2M) x_i|_2 / |M x_i|_2.
double coordinate_eigenresidual(const SurfaceMesh& mesh);
double coordinate_eigenresidual(const Operators& ops, const SurfaceMesh& mesh);

inline constexpr double kMinimalityThreshold = 2e-2;

enum class MontielRosVerdict { kCliffordConsistent, kBelowTwo, kInconclusive };

std::string to_string(MontielRosVerdict v);

struct MontielRosReport {
  MontielRosVerdict verdict = MontielRosVerdict::kInconclusive;
  double lambda1 = 0;
  double margin = 0;
  double coordinate_residual = 0;
  // lambda1 <= 1 on a minimal candidate signals a discretization failure.
  bool lower_bound_warning = false;
};

// Throws NotMinimalError if the coordinate residual exceeds `threshold`.
MontielRosReport montiel_ros_test(const SurfaceMesh& mesh, double margin,
                                  double threshold = kMinimalityThreshold);

// |lambda1(n) - lambda1(n/2)| / 3, the Richardson estimate of the error of
// lambda1 at resolution n for a second-order scheme.
double lambda1_error_estimate(const TorusImmersion& m, int n);

// As above, with the margin checked against lambda1_error_estimate(m, n);
// throws MarginTooSmallError if margin does not exceed it.
MontielRosReport montiel_ros_test(const TorusImmersion& m, int n, double margin,
                                  double threshold = kMinimalityThreshold);

// Little-endian dump: "S3EF", int32 n_u, n_v, count, then count * n_u * n_v
// doubles, one row-major grid per eigenfunction.
void write_eigenfunctions(const std::string& path, const SpectralResult& r);
SpectralResult read_eigenfunctions(const std::string& path);

}  // namespace s3tori
