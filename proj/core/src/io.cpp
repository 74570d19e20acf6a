#include "toric/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace toric {

namespace {

void write(std::string& out, const Json& j, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      // Keep floats recognizable as floats.
      if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && pretty ? ", " : ",";
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
        first = false;
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
        first = false;
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

IntVec int_vec(const Json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string(what) + " must be an array of integers");
  IntVec v;
  for (const auto& e : j) {
    if (!e.is_number_integer()) parse_fail(std::string(what) + " must contain integers");
    v.push_back(e.get<std::int64_t>());
  }
  return v;
}

std::size_t get_dim(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_unsigned()) parse_fail("missing positive \"dim\"");
  const auto n = j["dim"].get<std::size_t>();
  if (n == 0) parse_fail("\"dim\" must be positive");
  return n;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

Polyhedron polyhedron_from_json(const Json& j) {
  const std::size_t n = get_dim(j);
  if (!j.contains("normals") || !j.contains("offsets")) parse_fail("polyhedron needs \"normals\" and \"offsets\"");
  const Json& nj = j["normals"];
  const Json& oj = j["offsets"];
  if (!nj.is_array() || !oj.is_array() || nj.size() != oj.size())
    parse_fail("\"normals\" and \"offsets\" must be arrays of equal length");
  std::vector<IntVec> normals;
  std::vector<Rational> offsets;
  for (const auto& row : nj) {
    normals.push_back(int_vec(row, "normal"));
    if (normals.back().size() != n) parse_fail("normal has wrong dimension");
  }
  for (const auto& o : oj) {
    if (o.is_string())
      offsets.push_back(parse_rational(o.get<std::string>()));
    else if (o.is_number_integer())
      offsets.emplace_back(o.get<std::int64_t>());
    else
      parse_fail("offsets must be rational strings such as \"1\" or \"-3/2\"");
  }
  return Polyhedron::make(n, normals, offsets);
}

Json to_json(const Polyhedron& p) {
  Json j;
  j["dim"] = p.dim();
  j["normals"] = Json::array();
  for (const auto& v : p.normals()) j["normals"].push_back(v);
  j["offsets"] = Json::array();
  for (const auto& a : p.offsets()) j["offsets"].push_back(to_string(a));
  return j;
}

Fan fan_from_json(const Json& j) {
  const std::size_t n = get_dim(j);
  if (!j.contains("rays") || !j.contains("max_cones") || !j["rays"].is_array() || !j["max_cones"].is_array())
    parse_fail("fan needs \"rays\" and \"max_cones\" arrays");
  std::vector<IntVec> rays;
  for (const auto& r : j["rays"]) {
    rays.push_back(int_vec(r, "ray"));
    if (rays.back().size() != n) parse_fail("ray has wrong dimension");
  }
  std::vector<Fan::ConeIndices> cones;
  for (const auto& c : j["max_cones"]) {
    Fan::ConeIndices idx;
    for (auto i : int_vec(c, "cone")) {
      if (i < 0) parse_fail("cone indices must be nonnegative");
      idx.push_back(static_cast<std::size_t>(i));
    }
    cones.push_back(idx);
  }
  return Fan::make(n, rays, cones);
}

Json to_json(const Fan& f) {
  Json j;
  j["dim"] = f.dim();
  j["rays"] = f.rays();
  j["max_cones"] = f.max_cones();
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

Polyhedron read_polyhedron_file(const std::string& path) { return polyhedron_from_json(read_json_file(path)); }

Json to_json(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json to_json(const DelzantCertificate& c) {
  Json j;
  j["delzant"] = c.delzant;
  if (c.failing_vertex) {
    j["failing_vertex"] = *c.failing_vertex;
    Json pt = Json::array();
    for (const auto& x : c.vertex_point) pt.push_back(to_string(x));
    j["vertex"] = pt;
    j["determinant"] = c.determinant.str();
  }
  j["reason"] = c.reason;
  return j;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["b_P"] = to_json(r.b_P);
  j["value"] = r.value;
  j["grad_norm"] = r.grad_norm;
  j["hessian_min_eig"] = r.hessian_min_eig;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["trace"] = Json::array();
  for (const auto& t : r.trace) j["trace"].push_back({{"b", to_json(t.b)}, {"value", t.value}, {"grad_norm", t.grad_norm}});
  return j;
}

Json to_json(const ResidualField& f) {
  return {{"sup_norm", f.sup_norm}, {"interior_cells", f.interior_cells}, {"excluded_band", f.excluded_band}};
}

Json to_json(const AdmissibilityReport& r) {
  return {{"volume", r.volume},           {"first_moments", to_json(r.first_moments)},
          {"up_integral", r.up_integral}, {"finite_volume", r.finite_volume},
          {"balanced", r.balanced},       {"up_integrable", r.up_integrable},
          {"admissible", r.admissible}};
}

Json to_json(const GeodesicScanReport& r) {
  Json j;
  j["t_samples"] = r.t;
  j["D_values"] = r.d_values;
  j["D1_values"] = r.ding1_values;
  j["second_differences"] = r.second_differences;
  j["logconcavity_values"] = r.logconcavity_values;
  j["noise"] = r.noise;
  j["min_second_difference"] = r.min_second_difference;
  j["convex"] = r.convex;
  j["log_concave"] = r.log_concave;
  j["equality_flag"] = r.equality_flag;
  j["affine_fit"] = {{"slope", to_json(r.affine_fit.slope)},
                     {"constant", r.affine_fit.constant},
                     {"residual", r.affine_fit.residual}};
  return j;
}

Json to_json(const FirstVariationReport& r) {
  return {{"fd_ding1", r.fd_ding1},
          {"predicted", r.predicted},
          {"relative_error", r.relative_error},
          {"fd_ding", r.fd_ding},
          {"h", r.h}};
}

Json to_json(const FutakiProfile& p) {
  Json j;
  j["n"] = p.params.n;
  j["kappa"] = p.params.kappa;
  j["mu"] = p.params.mu;
  j["phi0"] = p.phi0;
  j["leading_coefficient"] = p.leading_coefficient;
  j["orders"] = {p.orders[0], p.orders[1], p.orders[2]};
  j["ricci_ratio_order"] = p.ricci_ratio_order;
  j["min_phi"] = p.min_phi;
  j["samples"] = {{"tau", p.tau},         {"phi", p.phi},       {"dphi", p.dphi},  {"ddphi", p.ddphi},
                  {"ricci_t", p.ricci_t}, {"ricci_tt", p.ricci_tt}, {"ratio", p.ratio}};
  return j;
}

Json to_json(const EntryReport& r) {
  Json j;
  j["name"] = r.name;
  if (r.b_P) j["b_P"] = to_json(*r.b_P);
  j["checks"] = Json::array();
  for (const auto& c : r.checks) {
    Json cj{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}};
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  j["passed"] = r.passed;
  return j;
}

Json to_json(const InvolutionReport& r) {
  return {{"error", r.error}, {"samples", r.samples}, {"degenerate", r.degenerate}};
}

Json error_json(const Error& e) { return {{"error", std::string(to_string(e.code()))}, {"detail", e.detail()}}; }

}  // namespace toric
