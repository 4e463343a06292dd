#include "curv/fem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "curv/errors.hpp"

namespace curv {

namespace {

struct QuadPoint {
    double l0, l1, l2, w; // barycentric coordinates and weight (times area)
};

// degree-2 midpoint rule
const QuadPoint kRule3[] = {
    {0.5, 0.5, 0.0, 1.0 / 3.0},
    {0.0, 0.5, 0.5, 1.0 / 3.0},
    {0.5, 0.0, 0.5, 1.0 / 3.0},
};

// degree-5 seven-point rule
const QuadPoint kRule7[] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.0597158717897698, 0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
    {0.7974269853530873, 0.1012865073234563, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
};

double disk_parameter(double kappa) { return kappa / (4.0 - 3.0 * std::abs(kappa)); }

} // namespace

DiscreteProblem assemble(const TriangleMesh& m) {
    const int n = (int)m.nodes.size();
    const double ell = disk_parameter(m.kappa.kappa);
    std::vector<Eigen::Triplet<double>> tk, tm;
    tk.reserve(m.elements.size() * 9);
    tm.reserve(m.elements.size() * 9);

    for (const auto& e : m.elements) {
        const Vec2 p0 = m.nodes[e[0]], p1 = m.nodes[e[1]], p2 = m.nodes[e[2]];
        const double area2 = (p1 - p0).cross(p2 - p0);
        if (!(area2 > 1e-300)) throw AssemblyError("singular element Jacobian");
        const double area = area2 / 2.0;

        // P1 gradients: grad l_i = (b_i, c_i) / area2
        const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                tk.emplace_back(e[i], e[j], (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2));

        // mass with the conformal weight; upgrade the rule under strong
        // conformal variation over the element
        double r2max = 0.0;
        for (int i = 0; i < 3; ++i)
            r2max = std::max(r2max, m.nodes[e[i]].dot(m.nodes[e[i]]));
        const bool strong = std::abs(ell) * r2max > 0.5;
        const QuadPoint* rule = strong ? kRule7 : kRule3;
        const int nq = strong ? 7 : 3;

        double me[3][3] = {};
        for (int q = 0; q < nq; ++q) {
            const QuadPoint& qp = rule[q];
            const Vec2 x = p0 * qp.l0 + p1 * qp.l1 + p2 * qp.l2;
            const double rho = conformal_factor(m.kappa, {Chart::PoincareDisk, x});
            const double lam[3] = {qp.l0, qp.l1, qp.l2};
            const double w = qp.w * area * rho;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) me[i][j] += w * lam[i] * lam[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tm.emplace_back(e[i], e[j], me[i][j]);
    }

    DiscreteProblem p;
    p.n_dofs = n;
    p.mesh = &m;
    p.stiffness.resize(n, n);
    p.mass.resize(n, n);
    p.stiffness.setFromTriplets(tk.begin(), tk.end());
    p.mass.setFromTriplets(tm.begin(), tm.end());

    std::vector<char> is_dir(n, 0);
    for (const auto& be : m.boundary_edges)
        if (m.edge_bc[be[2]] == EdgeBC::Dirichlet) is_dir[be[0]] = is_dir[be[1]] = 1;
    for (int i = 0; i < n; ++i)
        if (is_dir[i]) p.dirichlet_dofs.push_back(i);
    return p;
}

Spectrum solve_smallest(const DiscreteProblem& p, int k, double tol) {
    if (k < 1) throw DomainError("solve_smallest requires k >= 1");
    const int n = p.n_dofs;
    const int ndir = (int)p.dirichlet_dofs.size();
    const int nfree = n - ndir;
    if (k + ndir >= n) throw DomainError("k plus Dirichlet constraints must be < n_dofs");

    // reduced problem on free dofs
    std::vector<int> full_of(nfree), red_of(n, -1);
    {
        int j = 0;
        size_t d = 0;
        for (int i = 0; i < n; ++i) {
            if (d < p.dirichlet_dofs.size() && p.dirichlet_dofs[d] == i) {
                ++d;
                continue;
            }
            red_of[i] = j;
            full_of[j++] = i;
        }
    }
    auto reduce = [&](const Eigen::SparseMatrix<double>& A) {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(A.nonZeros());
        for (int c = 0; c < A.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
                if (red_of[it.row()] >= 0 && red_of[it.col()] >= 0)
                    t.emplace_back(red_of[it.row()], red_of[it.col()], it.value());
        Eigen::SparseMatrix<double> R(nfree, nfree);
        R.setFromTriplets(t.begin(), t.end());
        return R;
    };
    const Eigen::SparseMatrix<double> Kr = reduce(p.stiffness);
    const Eigen::SparseMatrix<double> Mr = reduce(p.mass);

    const bool neumann = ndir == 0;
    const int kit = neumann ? k - 1 : k; // pairs computed iteratively

    Spectrum s;
    if (p.mesh) {
        s.bc = p.mesh->edge_bc;
        s.kappa = p.mesh->kappa.kappa;
        s.h = p.mesh->h;
    }
    s.n_dofs = n;

    const double total_mass = Eigen::VectorXd::Ones(nfree).dot(Mr * Eigen::VectorXd::Ones(nfree));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nfree) / std::sqrt(total_mass);

    auto fix_sign = [](Eigen::VectorXd& v) {
        int best = 0;
        for (int i = 1; i < (int)v.size(); ++i)
            if (std::abs(v[i]) > std::abs(v[best])) best = i;
        if (v[best] < 0.0) v = -v;
    };
    auto expand = [&](const Eigen::VectorXd& vr) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < nfree; ++j) v[full_of[j]] = vr[j];
        return v;
    };

    if (neumann) {
        EigenPair zero;
        zero.value = 0.0;
        zero.vector = expand(ones);
        zero.residual = 0.0;
        zero.index = 0;
        s.pairs.push_back(std::move(zero));
        if (kit == 0) return s;
    }

    // shift-invert subspace iteration; for Neumann the shift is half the
    // area-based Weyl guess for the first nonzero eigenvalue
    const int nsub = std::min(nfree, std::max(2 * kit, kit + 8));

    double sigma = neumann ? 0.5 * 4.0 * M_PI / total_mass : 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact;
    for (int attempt = 0;; ++attempt) {
        Eigen::SparseMatrix<double> shifted = Kr - sigma * Mr;
        if (sigma == 0.0 && neumann) shifted = Kr + 1e-10 * Mr; // keep LDLT regular
        fact.compute(shifted);
        if (fact.info() == Eigen::Success) {
            // inertia check: the number of eigenvalues below the shift must
            // fit inside the subspace, or shift-invert targets the wrong end
            int below = 0;
            const auto D = fact.vectorD();
            for (int i = 0; i < D.size(); ++i)
                if (D[i] < 0.0) ++below;
            if (below <= std::max(kit + (neumann ? 1 : 0), nsub - 2)) break;
        }
        if (attempt >= 60) throw AssemblyError("factorization failed");
        sigma = (fact.info() == Eigen::Success) ? sigma / 2.0 : sigma + 1e-8;
        if (std::abs(sigma) < 1e-12) sigma = 0.0;
    }
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd X(nfree, nsub);
    for (int j = 0; j < nsub; ++j)
        for (int i = 0; i < nfree; ++i) X(i, j) = uni(rng);

    const Eigen::VectorXd Mones = Mr * ones;
    auto deflate = [&](Eigen::MatrixXd& Y) {
        if (!neumann) return;
        for (int j = 0; j < Y.cols(); ++j) Y.col(j) -= ones * Mones.dot(Y.col(j));
    };
    auto m_orthonormalize = [&](Eigen::MatrixXd& Y) {
        for (int j = 0; j < Y.cols(); ++j) {
            for (int rep = 0; rep < 2; ++rep)
                for (int i = 0; i < j; ++i)
                    Y.col(j) -= Y.col(i) * (Y.col(i).dot(Mr * Y.col(j)));
            const double nrm = std::sqrt(Y.col(j).dot(Mr * Y.col(j)));
            if (nrm > 1e-300)
                Y.col(j) /= nrm;
            else
                for (int i = 0; i < nfree; ++i) Y(i, j) = uni(rng);
        }
    };

    // diagonal estimate of the M^{-1} residual norm
    const Eigen::VectorXd dinv = Mr.diagonal().cwiseMax(1e-300).cwiseInverse().cwiseSqrt();

    deflate(X);
    m_orthonormalize(X);

    const int max_iter = 500;
    Eigen::VectorXd values(nsub);
    std::vector<double> resid(kit, 1e30);
    bool done = false;
    for (int iter = 0; iter < max_iter && !done; ++iter) {
        Eigen::MatrixXd Y = fact.solve(Mr * X);
        deflate(Y);
        m_orthonormalize(Y);
        const Eigen::MatrixXd A = Y.transpose() * (Kr * Y);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((A + A.transpose()) / 2.0);
        X = Y * es.eigenvectors();
        values = es.eigenvalues();
        done = true;
        for (int j = 0; j < kit; ++j) {
            const Eigen::VectorXd r = Kr * X.col(j) - values[j] * (Mr * X.col(j));
            resid[j] = (dinv.asDiagonal() * r).norm();
            if (resid[j] > tol * (1.0 + std::abs(values[j]))) done = false;
        }
    }
    if (!done) {
        std::vector<double> vals(values.data(), values.data() + kit);
        throw NoConvergence("eigensolver did not converge", max_iter, vals, resid);
    }

    for (int j = 0; j < kit; ++j) {
        EigenPair pair;
        pair.value = std::max(0.0, values[j]);
        Eigen::VectorXd vr = X.col(j);
        pair.vector = expand(vr);
        fix_sign(pair.vector);
        pair.residual = resid[j];
        pair.index = (int)s.pairs.size();
        s.pairs.push_back(std::move(pair));
    }
    return s;
}

double rayleigh_quotient(const DiscreteProblem& p, const Eigen::VectorXd& v) {
    if (v.size() != p.n_dofs) throw ShapeMismatch("vector length does not match dof count");
    if (v.norm() == 0.0) throw ZeroVector("rayleigh_quotient of the zero vector");
    const double num = v.dot(p.stiffness * v);
    const double den = v.dot(p.mass * v);
    if (den <= 0.0) throw ZeroVector("vector has zero mass norm");
    return num / den;
}

double eigen_gap(const Spectrum& s) {
    const bool neumann = s.bc[0] == EdgeBC::Neumann && s.bc[1] == EdgeBC::Neumann &&
                         s.bc[2] == EdgeBC::Neumann;
    if (neumann) {
        if (s.pairs.size() < 3) throw InsufficientPairs("Neumann gap needs >= 3 pairs");
        return (s.pairs[2].value - s.pairs[1].value) / s.pairs[1].value;
    }
    if (s.pairs.size() < 2) throw InsufficientPairs("mixed gap needs >= 2 pairs");
    return (s.pairs[1].value - s.pairs[0].value) / s.pairs[0].value;
}

} // namespace curv
