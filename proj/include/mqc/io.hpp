#pragma once

#include <string>
#include <variant>

#include "json.hpp"
#include "mqc/gaussian.hpp"
#include "mqc/qstate.hpp"
#include "mqc/steering.hpp"

namespace mqc {

using Json = nlohmann::json;

// Complex matrices are nested row-major arrays of [re, im] pairs; real
// matrices are plain nested arrays.
Json to_json(const CMatrix& m);
Json to_json(const RMatrix& m);
CMatrix cmatrix_from_json(const Json& j);
RMatrix rmatrix_from_json(const Json& j);

Json to_json(const DensityState& s);
Json to_json(const GaussianState& g);
Json to_json(const MeasurementAssemblage& ma);
Json to_json(const StateAssemblage& sa);

DensityState density_from_json(const Json& j);
GaussianState gaussian_from_json(const Json& j);
MeasurementAssemblage measurements_from_json(const Json& j);
StateAssemblage assemblage_from_json(const Json& j);

using AnyState = std::variant<DensityState, GaussianState>;
AnyState state_from_json(const Json& j);

// File helpers; malformed content raises ParseError.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace mqc
