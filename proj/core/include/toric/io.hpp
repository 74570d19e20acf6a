#pragma once

// JSON readers and writers for the CLI. Numbers are written with 17
// significant digits so that every double round-trips.

#include <string>

#include <nlohmann/json.hpp>

#include "toric/catalog.hpp"
#include "toric/ding.hpp"
#include "toric/error.hpp"
#include "toric/legendre.hpp"
#include "toric/polyhedral.hpp"
#include "toric/soliton.hpp"
#include "toric/weighted_volume.hpp"

namespace toric {

using Json = nlohmann::ordered_json;

/// Serializes with %.17g for floating-point values; indent < 0 gives one line.
std::string dump_json(const Json& j, int indent = 2);

/// {"dim": n, "normals": [[...]], "offsets": ["p/q", ...]}; throws ParseError.
Polyhedron polyhedron_from_json(const Json& j);
Json to_json(const Polyhedron& p);
/// {"dim": n, "rays": [[...]], "max_cones": [[...]]}; throws ParseError.
Fan fan_from_json(const Json& j);
Json to_json(const Fan& f);

/// Reads a file and parses it (IoError, ParseError).
Json read_json_file(const std::string& path);
Polyhedron read_polyhedron_file(const std::string& path);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const DelzantCertificate& c);
Json to_json(const SolveReport& r);
Json to_json(const ResidualField& f);  // summary only
Json to_json(const AdmissibilityReport& r);
Json to_json(const GeodesicScanReport& r);
Json to_json(const FirstVariationReport& r);
Json to_json(const FutakiProfile& p);
Json to_json(const EntryReport& r);
Json to_json(const InvolutionReport& r);

Json error_json(const Error& e);

}  // namespace toric
