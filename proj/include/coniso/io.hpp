#pragma once

#include <string>

#include "coniso/cosmic.hpp"
#include "coniso/geometry.hpp"
#include "coniso/inequalities.hpp"
#include "coniso/radial.hpp"
#include "coniso/rearrangement.hpp"

#include "json.hpp"

namespace coniso {

using json = nlohmann::ordered_json;

/// Field dump: header "# nx ny h ox oy", then one "i,j,value,mask" row per node.
void dump_field_csv(const ScalarField& f, const std::string& path);
ScalarField load_field_csv(const std::string& path);

/// Profile dump: parameter comment "# N L a u0 tol", column header, r,u,du rows.
void dump_profile_csv(const RadialProfile& p, const std::string& path);
RadialProfile load_profile_csv(const std::string& path);

/// Level-set dump: parameter header (alpha, K0, mu0, t_m), then
/// s, eta_star, F, P_alpha, J_alpha rows.
void dump_levelset_csv(const LevelSetData& ls, const std::string& path);

json report_to_json(const InequalityReport& r);
json report_to_json(const PointwiseReport& r);
json report_to_json(const MonotonicityReport& r, const LevelSetData& ls);
json report_to_json(const MassReport& r);
json report_to_json(const AuxReport& r);
json report_to_json(const TotalMass& tm);
json report_to_json(const KelvinResult& kr);

void write_text(const std::string& path, const std::string& text);

}  // namespace coniso
