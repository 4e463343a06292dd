#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <array>
#include <vector>

#include "curv/mesh.hpp"

namespace curv {

// K encodes the Dirichlet energy, M the metric-weighted L2 inner product.
// Both are assembled on the full node set; Dirichlet constraints are applied
// by dof elimination inside the solver.
struct DiscreteProblem {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    std::vector<int> dirichlet_dofs; // sorted node indices
    int n_dofs = 0;
    const TriangleMesh* mesh = nullptr;
};

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector; // full nodal vector, zero on Dirichlet dofs
    double residual = 0.0;
    int index = 0;
};

struct Spectrum {
    std::vector<EigenPair> pairs;
    std::array<EdgeBC, 3> bc{};
    double kappa = 0.0;
    double h = 0.0;
    int n_dofs = 0;
};

DiscreteProblem assemble(const TriangleMesh& m);

// k smallest eigenpairs of K v = lambda M v on the free dofs; for pure
// Neumann the constant zero mode is deflated analytically and reported as
// pairs[0] with value 0.
Spectrum solve_smallest(const DiscreteProblem& p, int k, double tol = 1e-9);

double rayleigh_quotient(const DiscreteProblem& p, const Eigen::VectorXd& v);

// relative spectral gap: (mu3 - mu2)/mu2 for pure Neumann, (l2 - l1)/l1 mixed
double eigen_gap(const Spectrum& s);

} // namespace curv
