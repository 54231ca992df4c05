#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "s3tori/errors.hpp"
#include "s3tori/spectral.hpp"

using namespace s3tori;

namespace {

Eigen::VectorXd grid_function(const SurfaceMesh& mesh, double (*f)(double, double)) {
  Eigen::VectorXd out(mesh.vertex_count());
  for (int i = 0; i < mesh.n_u; ++i) {
    for (int j = 0; j < mesh.n_v; ++j) out[mesh.index(i, j)] = f(i * mesh.du, j * mesh.dv);
  }
  return out;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("operators are symmetric with constants in the kernel") {
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), 16, 16);
  const Operators ops = assemble_operators(mesh);
  const SparseMatrix kt = ops.stiffness.transpose();
  const SparseMatrix mt = ops.mass.transpose();
  CHECK((ops.stiffness - kt).norm() < 1e-12);
  CHECK((ops.mass - mt).norm() < 1e-12);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.vertex_count());
  CHECK((ops.stiffness * one).norm() < 1e-12);
  // Clifford torus area 2 pi^2.
  CHECK(one.dot(ops.mass * one) == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("rayleigh quotients of Clifford eigenfunctions") {
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), 64, 64);
  const Operators ops = assemble_operators(mesh);
  // Delta = 2 (d_uu + d_vv) on the Clifford torus: cos(m u) cos(n v) has eigenvalue 2(m^2 + n^2).
  const auto cos_u = grid_function(mesh, [](double u, double) { return std::cos(u); });
  const auto cos_2u = grid_function(mesh, [](double u, double) { return std::cos(2 * u); });
  const auto mixed = grid_function(mesh, [](double u, double v) { return std::sin(u) * std::cos(v); });
  CHECK(rayleigh_quotient(ops, cos_u) == doctest::Approx(2.0).epsilon(2e-3));
  CHECK(rayleigh_quotient(ops, cos_2u) == doctest::Approx(8.0).epsilon(5e-3));
  CHECK(rayleigh_quotient(ops, mixed) == doctest::Approx(4.0).epsilon(3e-3));
  CHECK(rayleigh_quotient(mesh, cos_2u) == doctest::Approx(rayleigh_quotient(ops, cos_2u)));
  // Adding a constant changes nothing.
  const Eigen::VectorXd shifted = cos_u.array() + 3.0;
  CHECK(rayleigh_quotient(ops, shifted) == doctest::Approx(rayleigh_quotient(ops, cos_u)));
  CHECK_THROWS_AS(rayleigh_quotient(ops, Eigen::VectorXd::Constant(mesh.vertex_count(), 2.0)),
                  DegenerateFunctionError);
}

TEST_CASE("Clifford spectrum and multiplicities") {
  const SpectralResult r = first_eigenpairs(sample_mesh(*clifford_torus(), 64, 64), 9);
  REQUIRE(r.eigenvalues.size() == 9);
  CHECK(std::abs(r.eigenvalues[0]) < 1e-8);
  for (int i = 1; i <= 4; ++i) CHECK(r.eigenvalues[i] == doctest::Approx(2.0).epsilon(2e-3));
  for (int i = 5; i <= 8; ++i) CHECK(r.eigenvalues[i] == doctest::Approx(4.0).epsilon(3e-3));
  REQUIRE(r.groups.size() == 3);
  CHECK(r.groups[1].first == 1);
  CHECK(r.groups[1].size == 4);
  CHECK(r.groups[2].size == 4);
  CHECK(r.n_u == 64);
  for (double res : r.residuals) CHECK(res < 1e-6);
  // M-orthonormal columns.
  const Operators ops = assemble_operators(sample_mesh(*clifford_torus(), 64, 64));
  const Eigen::MatrixXd gram = r.eigenfunctions.transpose() * (ops.mass * r.eigenfunctions);
  CHECK((gram - Eigen::MatrixXd::Identity(9, 9)).norm() < 1e-8);
}

TEST_CASE("homogeneous torus spectrum") {
  // r = pi/6: eigenvalues m^2 / cos^2 r + n^2 / sin^2 r = 4 m^2 / 3 + 4 n^2.
  const SpectralResult r = first_eigenpairs(sample_mesh(*homogeneous_torus(kPi / 6), 64, 64), 5);
  CHECK(r.eigenvalues[1] == doctest::Approx(4.0 / 3).epsilon(2e-3));
  CHECK(r.eigenvalues[2] == doctest::Approx(4.0 / 3).epsilon(2e-3));
  CHECK(r.eigenvalues[3] == doctest::Approx(4.0).epsilon(3e-3));
  CHECK(r.eigenvalues[4] == doctest::Approx(4.0).epsilon(3e-3));
}

TEST_CASE("eigenpair count is checked") {
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), 8, 8);
  CHECK_THROWS_AS(first_eigenpairs(mesh, 1), std::invalid_argument);
  CHECK_THROWS_AS(first_eigenpairs(mesh, 64), std::invalid_argument);
  EigenOptions opt;
  opt.max_iterations = 1;
  opt.tolerance = 1e-15;
  CHECK_THROWS_AS(first_eigenpairs(sample_mesh(*clifford_torus(), 32, 32), 6, opt),
                  ConvergenceError);
}

TEST_CASE("multiplicity grouping") {
  const auto g = multiplicity_groups({0.0, 1.0, 1.005, 1.02, 3.0, 3.0});
  REQUIRE(g.size() == 4);
  CHECK(g[0].size == 1);
  CHECK(g[1].first == 1);
  CHECK(g[1].size == 2);
  CHECK(g[1].mean == doctest::Approx(1.0025));
  CHECK(g[2].first == 3);
  CHECK(g[3].size == 2);
  CHECK(multiplicity_groups({}).empty());
}

TEST_CASE("coordinate functions of minimal tori") {
  CHECK(coordinate_eigenresidual(sample_mesh(*clifford_torus(), 64, 64)) < 5e-3);
  CHECK(coordinate_eigenresidual(sample_mesh(*homogeneous_torus(kPi / 6), 64, 64)) > 0.1);
}

TEST_CASE("Montiel-Ros verdicts") {
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), 64, 64);
  const MontielRosReport r = montiel_ros_test(mesh, 1e-2);
  CHECK(r.verdict == MontielRosVerdict::kCliffordConsistent);
  CHECK(to_string(r.verdict) == "clifford-consistent");
  CHECK_FALSE(r.lower_bound_warning);
  CHECK(montiel_ros_test(mesh, 1e-5).verdict == MontielRosVerdict::kInconclusive);
  CHECK_THROWS_AS(montiel_ros_test(mesh, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(montiel_ros_test(sample_mesh(*homogeneous_torus(kPi / 6), 32, 32), 1e-2),
                  NotMinimalError);

  // Second order: the estimate tracks the true error |lambda1 - 2|.
  const double est = lambda1_error_estimate(*clifford_torus(), 64);
  CHECK(est == doctest::Approx(std::abs(r.lambda1 - 2.0)).epsilon(0.05));
  CHECK_THROWS_AS(lambda1_error_estimate(*clifford_torus(), 15), std::invalid_argument);
  CHECK_THROWS_AS(montiel_ros_test(*clifford_torus(), 32, 1e-6), MarginTooSmallError);
  CHECK(montiel_ros_test(*clifford_torus(), 32, 2e-2).verdict ==
        MontielRosVerdict::kCliffordConsistent);
}

TEST_CASE("eigenfunction files round trip") {
  const SpectralResult r = first_eigenpairs(sample_mesh(*clifford_torus(), 16, 32), 4);
  const std::string path = temp_path("s3tori_eigen_roundtrip.bin");
  write_eigenfunctions(path, r);
  const SpectralResult back = read_eigenfunctions(path);
  CHECK(back.n_u == 16);
  CHECK(back.n_v == 32);
  CHECK(back.eigenfunctions.cols() == 4);
  CHECK(back.eigenfunctions == r.eigenfunctions);
  CHECK(std::filesystem::file_size(path) == 4 + 12 + 8 * 4 * 16 * 32);

  std::ofstream(path, std::ios::binary) << "S3EF";
  CHECK_THROWS_AS(read_eigenfunctions(path), ParseError);
  std::ofstream(path, std::ios::binary) << "nope";
  CHECK_THROWS_AS(read_eigenfunctions(path), ParseError);
  std::filesystem::remove(path);
}
