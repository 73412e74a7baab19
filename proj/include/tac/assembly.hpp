#pragma once

// P1 finite-element assembly on the marked mesh: scalar mass/stiffness on
// the body and on the contact line, the elastic/viscous vector forms with
// the clamped boundary eliminated, the pressure-divergence coupling, the
// bulk-to-contact trace, and weighted contact masses.
//
// Vector fields use interleaved dofs: vertex v owns (2v, 2v+1).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <utility>
#include <vector>

#include "tac/errors.hpp"
#include "tac/mesh.hpp"

namespace tac {

using SpMat = Eigen::SparseMatrix<double>;

// Plane-strain coefficient tensors in Voigt form acting on (e11, e22, 2 e12).
// Inhomogeneous materials supply per-cell constants; empty means homogeneous.
struct ElasticityTensors {
  Eigen::Matrix3d elastic = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d viscous = Eigen::Matrix3d::Identity();
  std::vector<Eigen::Matrix3d> elastic_per_cell;
  std::vector<Eigen::Matrix3d> viscous_per_cell;

  static ElasticityTensors isotropic(double lambda_e, double mu_e, double lambda_v, double mu_v) {
    ElasticityTensors t;
    t.elastic << lambda_e + 2.0 * mu_e, lambda_e, 0.0,
                 lambda_e, lambda_e + 2.0 * mu_e, 0.0,
                 0.0, 0.0, mu_e;
    t.viscous << lambda_v + 2.0 * mu_v, lambda_v, 0.0,
                 lambda_v, lambda_v + 2.0 * mu_v, 0.0,
                 0.0, 0.0, mu_v;
    return t;
  }

  const Eigen::Matrix3d& elastic_at(int cell) const {
    return elastic_per_cell.empty() ? elastic : elastic_per_cell[cell];
  }
  const Eigen::Matrix3d& viscous_at(int cell) const {
    return viscous_per_cell.empty() ? viscous : viscous_per_cell[cell];
  }

  // Smallest eigenvalue of the form on symmetric matrices (Frobenius basis
  // (e11, e22, sqrt(2) e12)); > 0 is the ellipticity constant.
  static double min_eig_sym_basis(const Eigen::Matrix3d& c) {
    const Eigen::Vector3d scale(1.0, 1.0, std::sqrt(2.0));
    const Eigen::Matrix3d scaled = scale.asDiagonal() * c * scale.asDiagonal();
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(scaled).eigenvalues().minCoeff();
  }

  double alpha0() const {
    double a = min_eig_sym_basis(elastic);
    for (const auto& c : elastic_per_cell) a = std::min(a, min_eig_sym_basis(c));
    return a;
  }
  double beta0() const {
    double b = min_eig_sym_basis(viscous);
    for (const auto& c : viscous_per_cell) b = std::min(b, min_eig_sym_basis(c));
    return b;
  }

  void validate(int n_cells) const {
    const auto check_sym = [](const Eigen::Matrix3d& c, const char* what) {
      if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw EllipticityViolation(std::string(what) + " tensor is not symmetric");
    };
    check_sym(elastic, "elastic");
    check_sym(viscous, "viscous");
    for (const auto& c : elastic_per_cell) check_sym(c, "elastic");
    for (const auto& c : viscous_per_cell) check_sym(c, "viscous");
    if (!elastic_per_cell.empty() && static_cast<int>(elastic_per_cell.size()) != n_cells)
      throw ValidationError("ElasticityTensors: per-cell elastic list size mismatch");
    if (!viscous_per_cell.empty() && static_cast<int>(viscous_per_cell.size()) != n_cells)
      throw ValidationError("ElasticityTensors: per-cell viscous list size mismatch");
    if (!(alpha0() > 0.0)) throw EllipticityViolation("elastic tensor is not positive definite");
    if (!(beta0() > 0.0)) throw EllipticityViolation("viscous tensor is not positive definite");
  }
};

namespace detail {

struct CellGeom {
  double area;
  Eigen::Matrix<double, 2, 3> grad;  // gradients of the three barycentric basis functions
};

inline CellGeom cell_geometry(const Mesh& m, int c) {
  const auto& t = m.cells[c];
  const Eigen::Vector2d p0 = m.vertices[t[0]], p1 = m.vertices[t[1]], p2 = m.vertices[t[2]];
  const double area2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
  if (!(area2 > 0.0)) throw DegenerateCell("assembly: cell with nonpositive measure");
  CellGeom g;
  g.area = 0.5 * area2;
  g.grad.col(0) << (p1.y() - p2.y()) / area2, (p2.x() - p1.x()) / area2;
  g.grad.col(1) << (p2.y() - p0.y()) / area2, (p0.x() - p2.x()) / area2;
  g.grad.col(2) << (p0.y() - p1.y()) / area2, (p1.x() - p0.x()) / area2;
  return g;
}

// Adds a symmetric element matrix so that the global matrix is exactly equal
// to its transpose: each off-diagonal value is inserted once at (i,j) and
// once, bitwise identical, at (j,i).
template <class ElemMat>
void add_symmetric(std::vector<Eigen::Triplet<double>>& trips, const ElemMat& ke,
                   const std::vector<int>& dofs) {
  const int n = static_cast<int>(dofs.size());
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(dofs[i], dofs[i], ke(i, i));
    for (int j = i + 1; j < n; ++j) {
      const double v = ke(i, j);
      trips.emplace_back(dofs[i], dofs[j], v);
      trips.emplace_back(dofs[j], dofs[i], v);
    }
  }
}

}  // namespace detail

struct ScalarMatrices {
  SpMat M, S;
  Eigen::VectorXd M_lump;
};

inline ScalarMatrices assemble_scalar(const Mesh& mesh) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> tm, ts;
  Eigen::VectorXd lump = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto g = detail::cell_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    const std::vector<int> dofs{t[0], t[1], t[2]};
    Eigen::Matrix3d me;
    me.setConstant(g.area / 12.0);
    me.diagonal().setConstant(g.area / 6.0);
    const Eigen::Matrix3d se = g.area * g.grad.transpose() * g.grad;
    detail::add_symmetric(tm, me, dofs);
    detail::add_symmetric(ts, se, dofs);
    for (int k = 0; k < 3; ++k) lump[t[k]] += g.area / 3.0;
  }
  ScalarMatrices out;
  out.M.resize(n, n);
  out.S.resize(n, n);
  out.M.setFromTriplets(tm.begin(), tm.end());
  out.S.setFromTriplets(ts.begin(), ts.end());
  out.M_lump = std::move(lump);
  return out;
}

// Scalar mass/stiffness of the P1 line elements tiling the contact surface,
// indexed by contact-node order.
inline ScalarMatrices assemble_scalar_contact(const Mesh& mesh) {
  const int n = mesh.n_contact();
  std::vector<Eigen::Triplet<double>> tm, ts;
  Eigen::VectorXd lump = Eigen::VectorXd::Zero(n);
  for (const auto& e : mesh.contact_cells) {
    const double len =
        (mesh.vertices[mesh.contact_nodes[e[1]]] - mesh.vertices[mesh.contact_nodes[e[0]]]).norm();
    if (!(len > 0.0)) throw DegenerateCell("assembly: contact cell with nonpositive measure");
    const std::vector<int> dofs{e[0], e[1]};
    Eigen::Matrix2d me;
    me << len / 3.0, len / 6.0, len / 6.0, len / 3.0;
    Eigen::Matrix2d se;
    se << 1.0 / len, -1.0 / len, -1.0 / len, 1.0 / len;
    detail::add_symmetric(tm, me, dofs);
    detail::add_symmetric(ts, se, dofs);
    lump[e[0]] += 0.5 * len;
    lump[e[1]] += 0.5 * len;
  }
  ScalarMatrices out;
  out.M.resize(n, n);
  out.S.resize(n, n);
  out.M.setFromTriplets(tm.begin(), tm.end());
  out.S.setFromTriplets(ts.begin(), ts.end());
  out.M_lump = std::move(lump);
  return out;
}

// Elastic and viscous vector forms. With apply_dirichlet, rows and columns
// of clamped dofs are dropped and replaced by an identity diagonal
// (symmetric elimination).
inline std::pair<SpMat, SpMat> assemble_elastic(const Mesh& mesh, const ElasticityTensors& tensors,
                                                bool apply_dirichlet = true) {
  tensors.validate(static_cast<int>(mesh.cells.size()));
  const int n = 2 * mesh.n_vertices();
  std::vector<char> fixed(n, 0);
  if (apply_dirichlet)
    for (int v : mesh.gamma1_nodes) fixed[2 * v] = fixed[2 * v + 1] = 1;

  std::vector<Eigen::Triplet<double>> ta, tb;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto g = detail::cell_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    Eigen::Matrix<double, 3, 6> bm = Eigen::Matrix<double, 3, 6>::Zero();
    for (int k = 0; k < 3; ++k) {
      bm(0, 2 * k) = g.grad(0, k);
      bm(2, 2 * k) = g.grad(1, k);
      bm(1, 2 * k + 1) = g.grad(1, k);
      bm(2, 2 * k + 1) = g.grad(0, k);
    }
    const Eigen::Matrix<double, 6, 6> ka = g.area * bm.transpose() * tensors.elastic_at(c) * bm;
    const Eigen::Matrix<double, 6, 6> kb = g.area * bm.transpose() * tensors.viscous_at(c) * bm;
    std::vector<int> dofs(6);
    for (int k = 0; k < 3; ++k) {
      dofs[2 * k] = 2 * t[k];
      dofs[2 * k + 1] = 2 * t[k] + 1;
    }
    // Skip constrained rows/cols; the identity diagonal is added below.
    const auto add_constrained = [&](std::vector<Eigen::Triplet<double>>& trips,
                                     const Eigen::Matrix<double, 6, 6>& ke) {
      for (int i = 0; i < 6; ++i) {
        if (fixed[dofs[i]]) continue;
        trips.emplace_back(dofs[i], dofs[i], ke(i, i));
        for (int j = i + 1; j < 6; ++j) {
          if (fixed[dofs[j]]) continue;
          trips.emplace_back(dofs[i], dofs[j], ke(i, j));
          trips.emplace_back(dofs[j], dofs[i], ke(i, j));
        }
      }
    };
    add_constrained(ta, ka);
    add_constrained(tb, kb);
  }
  for (int d = 0; d < n; ++d)
    if (fixed[d]) {
      ta.emplace_back(d, d, 1.0);
      tb.emplace_back(d, d, 1.0);
    }
  SpMat a(n, n), b(n, n);
  a.setFromTriplets(ta.begin(), ta.end());
  b.setFromTriplets(tb.begin(), tb.end());
  return {std::move(a), std::move(b)};
}

struct CouplingMatrices {
  SpMat D;  // n_vertices x 2*n_vertices, q^T D v = integral of q * div(v)
  SpMat T;  // n_contact x n_vertices restriction to the contact line
};

inline CouplingMatrices assemble_coupling(const Mesh& mesh) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> td;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto g = detail::cell_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    // div of the vector basis is cellwise constant; integral against each
    // scalar basis function contributes area/3.
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) {
        td.emplace_back(t[k], 2 * t[i], g.area / 3.0 * g.grad(0, i));
        td.emplace_back(t[k], 2 * t[i] + 1, g.area / 3.0 * g.grad(1, i));
      }
  }
  CouplingMatrices out;
  out.D.resize(n, 2 * n);
  out.D.setFromTriplets(td.begin(), td.end());

  std::vector<Eigen::Triplet<double>> tt;
  for (int i = 0; i < mesh.n_contact(); ++i) tt.emplace_back(i, mesh.contact_nodes[i], 1.0);
  out.T.resize(mesh.n_contact(), n);
  out.T.setFromTriplets(tt.begin(), tt.end());
  return out;
}

// Contact-line mass weighted by a nodal field: the exact integral of
// kappa_h * phi_i * phi_j with kappa_h the P1 interpolant of the nodal
// values. Positive semidefinite whenever kappa >= 0 nodally.
inline SpMat weighted_contact_mass(const Mesh& mesh, const Eigen::VectorXd& kappa) {
  const int n = mesh.n_contact();
  if (kappa.size() != n) throw ValidationError("weighted_contact_mass: weight size mismatch");
  std::vector<Eigen::Triplet<double>> tw;
  for (const auto& e : mesh.contact_cells) {
    const double len =
        (mesh.vertices[mesh.contact_nodes[e[1]]] - mesh.vertices[mesh.contact_nodes[e[0]]]).norm();
    const double ka = kappa[e[0]], kb = kappa[e[1]];
    Eigen::Matrix2d we;
    we << len * (ka / 4.0 + kb / 12.0), len * (ka + kb) / 12.0,
          len * (ka + kb) / 12.0, len * (ka / 12.0 + kb / 4.0);
    detail::add_symmetric(tw, we, std::vector<int>{e[0], e[1]});
  }
  SpMat w(n, n);
  w.setFromTriplets(tw.begin(), tw.end());
  return w;
}

// Load vector <F, v> = integral f.v over the body + integral g.v over the
// traction boundary; exact for P1 data (consistent mass applied to nodal
// interpolants).
inline Eigen::VectorXd assemble_load(
    const Mesh& mesh, const std::function<Eigen::Vector2d(double, double, double)>& f,
    const std::function<Eigen::Vector2d(double, double, double)>& g, double t) {
  const int n = mesh.n_vertices();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
  if (f) {
    Eigen::VectorXd fx(n), fy(n);
    for (int v = 0; v < n; ++v) {
      const Eigen::Vector2d val = f(mesh.vertices[v].x(), mesh.vertices[v].y(), t);
      fx[v] = val.x();
      fy[v] = val.y();
    }
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
      const auto g2 = detail::cell_geometry(mesh, c);
      const auto& tri = mesh.cells[c];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double mij = g2.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
          out[2 * tri[i]] += mij * fx[tri[j]];
          out[2 * tri[i] + 1] += mij * fy[tri[j]];
        }
    }
  }
  if (g) {
    for (const auto& fct : mesh.boundary_facets) {
      if (fct.marker != BoundaryPart::Gamma2) continue;
      const double len = mesh.facet_length(fct);
      const Eigen::Vector2d ga = g(mesh.vertices[fct.a].x(), mesh.vertices[fct.a].y(), t);
      const Eigen::Vector2d gb = g(mesh.vertices[fct.b].x(), mesh.vertices[fct.b].y(), t);
      for (int d = 0; d < 2; ++d) {
        out[2 * fct.a + d] += len * (ga[d] / 3.0 + gb[d] / 6.0);
        out[2 * fct.b + d] += len * (ga[d] / 6.0 + gb[d] / 3.0);
      }
    }
  }
  return out;
}

// Consistent vector mass (per-component scalar mass), used by norms and
// manufactured-source assembly.
inline SpMat vector_mass(const Mesh& mesh) {
  const auto sc = assemble_scalar(mesh);
  std::vector<Eigen::Triplet<double>> tm;
  for (int k = 0; k < sc.M.outerSize(); ++k)
    for (SpMat::InnerIterator it(sc.M, k); it; ++it) {
      tm.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      tm.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  SpMat m(2 * mesh.n_vertices(), 2 * mesh.n_vertices());
  m.setFromTriplets(tm.begin(), tm.end());
  return m;
}

// Smallest generalized eigenvalues of A and B against the vector H1 norm on
// the clamped subspace (inverse power iteration); both must be > 0 by Korn.
inline std::pair<double, double> korn_constants(const Mesh& mesh, const SpMat& A, const SpMat& B) {
  const int n = 2 * mesh.n_vertices();
  const auto sc = assemble_scalar(mesh);
  std::vector<Eigen::Triplet<double>> tn;
  const SpMat H = sc.M + sc.S;
  for (int k = 0; k < H.outerSize(); ++k)
    for (SpMat::InnerIterator it(H, k); it; ++it) {
      tn.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      tn.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  SpMat N(n, n);
  N.setFromTriplets(tn.begin(), tn.end());

  std::vector<char> fixed(n, 0);
  for (int v : mesh.gamma1_nodes) fixed[2 * v] = fixed[2 * v + 1] = 1;
  const auto project = [&](Eigen::VectorXd& x) {
    for (int d = 0; d < n; ++d)
      if (fixed[d]) x[d] = 0.0;
  };

  const auto smallest = [&](const SpMat& K) {
    Eigen::SimplicialLDLT<SpMat> solver(K);
    if (solver.info() != Eigen::Success) throw LinearSolveFailure("korn_constants: factorization failed");
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d) x[d] = std::sin(1.0 + d);
    project(x);
    double lambda = 0.0;
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd y = N * x;
      project(y);
      x = solver.solve(y);
      project(x);
      const double nn = std::sqrt(x.dot(N * x));
      if (!(nn > 0.0)) throw EllipticityViolation("korn_constants: degenerate iterate");
      x /= nn;
      lambda = x.dot(K * x);  // Rayleigh quotient with x normalized in N
    }
    return lambda;
  };
  return {smallest(A), smallest(B)};
}

}  // namespace tac
