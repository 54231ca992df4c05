#include "s3tori/spectral.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "s3tori/errors.hpp"

namespace s3tori {

namespace {

struct VertexTensor {
  double rho;          // sqrt(det g)
  double a11, a12, a22;  // sqrt(det g) g^{-1}
};

std::vector<VertexTensor> vertex_tensors(const SurfaceMesh& mesh) {
  std::vector<VertexTensor> out(mesh.vertex_count());
  for (int id = 0; id < mesh.vertex_count(); ++id) {
    const auto [e, f, g] = mesh.metric[id];
    const double det = e * g - f * f;
    if (!(e > 0.0 && det > 0.0)) {
      throw DegenerateImmersionError("metric is not positive definite at vertex " +
                                     std::to_string(id));
    }
    const double rho = std::sqrt(det);
    out[id] = {rho, g / rho, -f / rho, e / rho};
  }
  return out;
}

}  // namespace

Operators assemble_operators(const SurfaceMesh& mesh) {
  const auto tensors = vertex_tensors(mesh);
  const double du = mesh.du, dv = mesh.dv;
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const double w = 0.25 * du * dv;
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(16 * mesh.vertex_count());
  mt.reserve(16 * mesh.vertex_count());
  // Local corners: (0,0), (1,0), (1,1), (0,1) in (s, t).
  const int cs[4] = {0, 1, 1, 0}, ct[4] = {0, 0, 1, 1};
  for (int i = 0; i < mesh.n_u; ++i) {
    for (int j = 0; j < mesh.n_v; ++j) {
      int id[4];
      for (int a = 0; a < 4; ++a) id[a] = mesh.index(i + cs[a], j + ct[a]);
      double ke[4][4] = {}, me[4][4] = {};
      for (double s : gp) {
        for (double t : gp) {
          double phi[4], ps[4], pt[4];
          for (int a = 0; a < 4; ++a) {
            const double fs = cs[a] ? s : 1.0 - s, ft = ct[a] ? t : 1.0 - t;
            phi[a] = fs * ft;
            ps[a] = (cs[a] ? 1.0 : -1.0) * ft / du;
            pt[a] = (ct[a] ? 1.0 : -1.0) * fs / dv;
          }
          VertexTensor q{0, 0, 0, 0};
          for (int a = 0; a < 4; ++a) {
            const auto& v = tensors[id[a]];
            q.rho += phi[a] * v.rho;
            q.a11 += phi[a] * v.a11;
            q.a12 += phi[a] * v.a12;
            q.a22 += phi[a] * v.a22;
          }
          for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
              ke[a][b] += w * (q.a11 * ps[a] * ps[b] + q.a12 * (ps[a] * pt[b] + pt[a] * ps[b]) +
                               q.a22 * pt[a] * pt[b]);
              me[a][b] += w * q.rho * phi[a] * phi[b];
            }
          }
        }
      }
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          kt.emplace_back(id[a], id[b], ke[a][b]);
          mt.emplace_back(id[a], id[b], me[a][b]);
        }
      }
    }
  }
  const int n = mesh.vertex_count();
  Operators ops;
  ops.stiffness.resize(n, n);
  ops.mass.resize(n, n);
  ops.stiffness.setFromTriplets(kt.begin(), kt.end());
  ops.mass.setFromTriplets(mt.begin(), mt.end());
  return ops;
}

double rayleigh_quotient(const Operators& ops, const Eigen::VectorXd& f) {
  if (f.size() != ops.mass.rows()) throw std::invalid_argument("function size mismatch");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f.size());
  const Eigen::VectorXd m1 = ops.mass * ones;
  const Eigen::VectorXd g = f - (m1.dot(f) / m1.sum()) * ones;
  const double mass = g.dot(ops.mass * g);
  if (!(mass >= 1e-14)) {
    throw DegenerateFunctionError("function has (near) zero mass norm after mean removal");
  }
  return g.dot(ops.stiffness * g) / mass;
}

double rayleigh_quotient(const SurfaceMesh& mesh, const Eigen::VectorXd& f) {
  return rayleigh_quotient(assemble_operators(mesh), f);
}

std::vector<MultiplicityGroup> multiplicity_groups(const std::vector<double>& ev, double rel) {
  std::vector<MultiplicityGroup> out;
  for (int i = 0; i < static_cast<int>(ev.size()); ++i) {
    if (!out.empty()) {
      auto& g = out.back();
      const double ref = ev[g.first];
      if (std::abs(ev[i] - ref) <= rel * std::abs(ref) + 1e-8) {
        g.mean = (g.mean * g.size + ev[i]) / (g.size + 1);
        ++g.size;
        continue;
      }
    }
    out.push_back({i, 1, ev[i]});
  }
  return out;
}

namespace {

double inf_norm(const SparseMatrix& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.maxCoeff();
}

void finish(SpectralResult& r, const Operators& ops, const Eigen::MatrixXd& x,
            const Eigen::VectorXd& lam, int count) {
  r.eigenvalues.assign(lam.data(), lam.data() + count);
  r.eigenfunctions = x.leftCols(count);
  r.residuals.resize(count);
  for (int i = 0; i < count; ++i) {
    r.residuals[i] =
        (ops.stiffness * x.col(i) - lam[i] * (ops.mass * x.col(i))).norm();
  }
  r.groups = multiplicity_groups(r.eigenvalues);
}

}  // namespace

SpectralResult first_eigenpairs(const Operators& ops, int n_u, int n_v, int count,
                                const EigenOptions& opt) {
  const int n = static_cast<int>(ops.mass.rows());
  if (count < 2 || count >= n) {
    throw std::invalid_argument("eigenpair count must satisfy 2 <= count < " + std::to_string(n));
  }
  SpectralResult r;
  r.n_u = n_u;
  r.n_v = n_v;
  const int b = std::min(count + opt.guard, n);
  if (2 * b >= n) {
    const Eigen::MatrixXd k(ops.stiffness), m(ops.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
    finish(r, ops, es.eigenvectors(), es.eigenvalues(), count);
    return r;
  }
  const SparseMatrix a = ops.stiffness - opt.shift * ops.mass;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("shifted stiffness factorization failed");

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, b);
  for (int c = 0; c < b; ++c)
    for (int i = 0; i < n; ++i) x(i, c) = normal(rng);

  const double target = opt.tolerance * inf_norm(ops.stiffness);
  double worst = 0.0;
  Eigen::VectorXd lam;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const Eigen::MatrixXd y = ldlt.solve(ops.mass * x);
    const Eigen::MatrixXd ky = ops.stiffness * y;
    const Eigen::MatrixXd my = ops.mass * y;
    Eigen::MatrixXd kr = y.transpose() * ky, mr = y.transpose() * my;
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kr, mr);
    lam = es.eigenvalues();
    x = y * es.eigenvectors();
    const Eigen::MatrixXd kx = ky * es.eigenvectors(), mx = my * es.eigenvectors();
    worst = 0.0;
    for (int i = 0; i < count; ++i) worst = std::max(worst, (kx.col(i) - lam[i] * mx.col(i)).norm());
    r.iterations = it;
    if (worst <= target) {
      finish(r, ops, x, lam, count);
      return r;
    }
  }
  std::ostringstream os;
  os << "eigen iteration stalled after " << opt.max_iterations << " iterations; residual "
     << worst << " > " << target;
  throw ConvergenceError(os.str());
}

SpectralResult first_eigenpairs(const SurfaceMesh& mesh, int count, const EigenOptions& opt) {
  return first_eigenpairs(assemble_operators(mesh), mesh.n_u, mesh.n_v, count, opt);
}

double coordinate_eigenresidual(const Operators& ops, const SurfaceMesh& mesh) {
  const int n = mesh.vertex_count();
  double worst = 0.0;
  for (int c = 0; c < 4; ++c) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = mesh.points[i][c];
    const Eigen::VectorXd mx = ops.mass * x;
    const double denom = mx.norm();
    if (!(denom > 0.0)) continue;
    worst = std::max(worst, (ops.stiffness * x - 2.0 * mx).norm() / denom);
  }
  return worst;
}

double coordinate_eigenresidual(const SurfaceMesh& mesh) {
  return coordinate_eigenresidual(assemble_operators(mesh), mesh);
}

std::string to_string(MontielRosVerdict v) {
  switch (v) {
    case MontielRosVerdict::kCliffordConsistent: return "clifford-consistent";
    case MontielRosVerdict::kBelowTwo: return "below-two";
    default: return "inconclusive";
  }
}

MontielRosReport montiel_ros_test(const SurfaceMesh& mesh, double margin, double threshold) {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  const Operators ops = assemble_operators(mesh);
  MontielRosReport rep;
  rep.margin = margin;
  rep.coordinate_residual = coordinate_eigenresidual(ops, mesh);
  if (rep.coordinate_residual > threshold) {
    std::ostringstream os;
    os << "coordinate eigenresidual " << rep.coordinate_residual << " exceeds " << threshold
       << "; the surface is not a minimal candidate";
    throw NotMinimalError(os.str());
  }
  rep.lambda1 = first_eigenpairs(ops, mesh.n_u, mesh.n_v, 2).eigenvalues[1];
  if (rep.lambda1 < 2.0 - margin) {
    rep.verdict = MontielRosVerdict::kBelowTwo;
  } else if (std::abs(rep.lambda1 - 2.0) <= margin) {
    rep.verdict = MontielRosVerdict::kCliffordConsistent;
  }
  rep.lower_bound_warning = rep.lambda1 <= 1.0;
  return rep;
}

double lambda1_error_estimate(const TorusImmersion& m, int n) {
  if (n < 16 || n % 2) throw std::invalid_argument("refinement pair needs an even n >= 16");
  const double fine = first_eigenpairs(sample_mesh(m, n, n), 2).eigenvalues[1];
  const double coarse = first_eigenpairs(sample_mesh(m, n / 2, n / 2), 2).eigenvalues[1];
  return std::abs(fine - coarse) / 3.0;
}

MontielRosReport montiel_ros_test(const TorusImmersion& m, int n, double margin, double threshold) {
  const double est = lambda1_error_estimate(m, n);
  if (!(margin > est)) {
    std::ostringstream os;
    os << "margin " << margin << " does not exceed the discretization error estimate " << est;
    throw MarginTooSmallError(os.str());
  }
  return montiel_ros_test(sample_mesh(m, n, n), margin, threshold);
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  // host is little-endian on every supported target; swap otherwise
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw ParseError("truncated eigenfunction file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_eigenfunctions(const std::string& path, const SpectralResult& r) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os.write("S3EF", 4);
    const int count = static_cast<int>(r.eigenfunctions.cols());
    put<std::int32_t>(os, r.n_u);
    put<std::int32_t>(os, r.n_v);
    put<std::int32_t>(os, count);
    for (int c = 0; c < count; ++c)
      for (int i = 0; i < r.eigenfunctions.rows(); ++i) put<double>(os, r.eigenfunctions(i, c));
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

SpectralResult read_eigenfunctions(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "S3EF", 4) != 0) {
    throw ParseError("not an eigenfunction file: " + path);
  }
  SpectralResult r;
  r.n_u = get<std::int32_t>(is);
  r.n_v = get<std::int32_t>(is);
  const int count = get<std::int32_t>(is);
  if (r.n_u <= 0 || r.n_v <= 0 || count < 0) throw ParseError("bad eigenfunction header");
  r.eigenfunctions.resize(static_cast<Eigen::Index>(r.n_u) * r.n_v, count);
  for (int c = 0; c < count; ++c)
    for (int i = 0; i < r.eigenfunctions.rows(); ++i) r.eigenfunctions(i, c) = get<double>(is);
  return r;
}

}  // namespace s3tori
