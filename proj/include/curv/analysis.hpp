#pragma once

#include <vector>

#include "curv/fem.hpp"
#include "curv/killing.hpp"
#include "curv/mesh.hpp"

namespace curv {

enum class NodalTopology { Empty, SimpleArc, Loop, Graph };

struct NodalEndpoint {
    Vec2 point;       // Poincare chart coordinates
    int edge = -1;    // parent triangle edge index, -1 if none
    int vertex = -1;  // triangle vertex index if the endpoint snaps to one
};

struct NodalSet {
    std::vector<std::vector<Vec2>> polylines;
    NodalTopology topology = NodalTopology::Empty;
    std::vector<NodalEndpoint> endpoints;  // two entries for SimpleArc
    std::vector<int> degree_sequence;      // populated for Graph
};

enum class CritKind { Min, Max, Saddle, Degenerate };

struct InteriorCritical {
    Vec2 location;
    double grad_mag = 0.0;
    CritKind kind = CritKind::Degenerate;
    bool continuum = false;  // flagged cluster of diameter > 10h (critical arc)
    double cluster_diameter = 0.0;
};

struct EdgeCritical {
    Vec2 location;
    int edge = -1;
    int sign_change = 0;  // +1 for - to +, -1 for + to - along the chain
};

struct CriticalReport {
    std::vector<InteriorCritical> interior_points;
    std::vector<EdgeCritical> edge_points;
    double tol = 0.0;
    double grad_max = 0.0;
};

struct DerivativeField {
    std::vector<double> values;  // Xu at every node
    double min_interior = 0.0;
    double max_interior = 0.0;
    int argmin_interior = -1;
    int n_interior = 0;
    int n_pos_interior = 0;
    int n_neg_interior = 0;
};

struct MonotoneResult {
    bool certified = false;
    int sign = 0;      // +1 or -1 when certified
    int witness = -1;  // most negative interior node when not certified
};

enum class VertexBCKind { Neumann, Mixed, Dirichlet };

struct VertexExpansion {
    int vertex = -1;
    VertexBCKind kind = VertexBCKind::Neumann;
    double beta = 0.0;
    double nu = 0.0;
    double a0 = 0.0, a1 = 0.0;  // Neumann channels r^0, r^nu
    double b0 = 0.0;            // mixed channel r^{nu/2}
    double c1 = 0.0;            // Dirichlet channel r^nu
    double residual = 0.0;
    double uncertainty = 0.0;  // spread between the two single-radius estimates
    double r1 = 0.0, r2 = 0.0;
};

// P1 point evaluation with brute-force element location
class MeshLocator {
public:
    explicit MeshLocator(const TriangleMesh& m);
    // element index containing the chart point, -1 if outside
    int locate(const Vec2& p) const;
    double evaluate(const Eigen::VectorXd& u, const Vec2& p) const;

private:
    const TriangleMesh& m_;
};

std::vector<Vec2> recover_gradient(const EigenPair& eig, const TriangleMesh& m);

NodalSet extract_nodal_set(const EigenPair& eig, const TriangleMesh& m);

CriticalReport detect_critical_points(const EigenPair& eig, const TriangleMesh& m,
                                      double tol = -1.0);

DerivativeField killing_derivative(const EigenPair& eig, const KillingField& X,
                                   const TriangleMesh& m);

MonotoneResult certify_monotone(const DerivativeField& d, double margin = 1e-6);

VertexExpansion vertex_coefficients(const EigenPair& eig, const TriangleMesh& m, int vertex);

} // namespace curv
