#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "curv/analysis.hpp"
#include "curv/continuation.hpp"
#include "curv/fem.hpp"
#include "curv/theorems.hpp"

namespace curv::io {

/// 17-significant-digit formatting for all CSV floating-point fields.
std::string fmt17(double v);

void write_file(const std::string& path, const std::string& content);

/// Parses a JSON file; malformed content or a missing file -> ConfigError.
nlohmann::json load_json(const std::string& path);

/// Rejects any key of `j` outside `allowed`; `where` names the object in the
/// error message. Also rejects non-object values.
void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where);

/// {"curvature": f, "chart": "klein"|"poincare"|"halfplane",
///  "vertices": [[x,y],[x,y],[x,y]], "bc": ["N"|"D", x3]}; bc optional
/// (all-Neumann default), unknown keys rejected.
GeodesicTriangle triangle_from_json(const nlohmann::json& j);

std::string spectrum_csv(const Spectrum& s);
std::string branches_csv(const BranchData& b);

nlohmann::json events_json(const BranchData& b);
nlohmann::json claim_json(const ClaimResult& c);
nlohmann::json case_json(const VerificationCase& vc);
nlohmann::json probe_row_json(const SphereProbeRow& r);

/// Static plot: triangle boundary colored by BC (Neumann blue, Dirichlet
/// red), a 10-level contour family in gray, nodal polylines as <path>
/// elements, critical points as circles.
std::string nodal_svg(const TriangleMesh& m, const Eigen::VectorXd& u, const NodalSet& nodal,
                      const CriticalReport& crit);

} // namespace curv::io
