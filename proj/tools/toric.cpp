// toric: command-line front end. Reports go to stdout as JSON; module errors
// print {"error", "detail"} and exit 1, usage errors exit 2.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toric/catalog.hpp"
#include "toric/ding.hpp"
#include "toric/error.hpp"
#include "toric/grid.hpp"
#include "toric/io.hpp"
#include "toric/legendre.hpp"
#include "toric/polyhedral.hpp"
#include "toric/soliton.hpp"
#include "toric/weighted_volume.hpp"

using namespace toric;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_number(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw UsageError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("bad number '" + s + "'");
  }
}

Eigen::VectorXd parse_vector(const std::string& s) {
  const auto parts = split(s, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_number(parts[i]);
  return v;
}

// "1,0;0,1;1,1"
std::vector<IntVec> parse_rays(const std::string& s) {
  std::vector<IntVec> rays;
  for (const auto& row : split(s, ';')) {
    IntVec r;
    for (const auto& e : split(row, ',')) {
      try {
        std::size_t pos = 0;
        r.push_back(std::stoll(e, &pos));
        if (pos != e.size()) throw UsageError("bad integer '" + e + "'");
      } catch (const std::logic_error&) {
        throw UsageError("bad integer '" + e + "'");
      }
    }
    rays.push_back(r);
  }
  if (rays.empty()) throw UsageError("no rays given");
  return rays;
}

// "min:max:count;..."
std::vector<GridAxis> parse_axes(const std::string& s) {
  std::vector<GridAxis> axes;
  for (const auto& a : split(s, ';')) {
    const auto f = split(a, ':');
    if (f.size() != 3) throw UsageError("axis must read min:max:count");
    const double c = to_number(f[2]);
    if (c < 1 || c != std::floor(c)) throw UsageError("axis count must be a positive integer");
    axes.push_back({to_number(f[0]), to_number(f[1]), static_cast<std::size_t>(c)});
  }
  return axes;
}

void print(const Json& j) { std::cout << dump_json(j) << '\n'; }

void emit_grid(const PotentialGrid& g, const std::string& out, bool binary) {
  const GridEncoding enc = binary ? GridEncoding::Binary : GridEncoding::Csv;
  if (out.empty() || out == "-")
    write_grid(std::cout, g, enc);
  else
    write_grid_file(out, g, enc);
}

Eigen::VectorXd check_dim(const Eigen::VectorXd& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n)
    throw UsageError(std::string(what) + " needs " + std::to_string(n) + " components");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toric soliton toolkit: Delzant checks, b_P, Legendre transforms, residuals, Ding scans"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for Monte Carlo confirmations");

  std::string poly_path, grid_a, grid_b, out_path, vec_text, rays_text, axes_text, name;
  bool binary = false, all = false, subtract = false;
  double tol = 1e-10;
  std::size_t samples = 9;

  auto* delzant = app.add_subcommand("delzant", "Delzant certificate of a polyhedron");
  delzant->add_option("poly", poly_path, "Polyhedron JSON")->required();

  auto* fan = app.add_subcommand("normal-fan", "Normal fan of a polyhedron");
  fan->add_option("poly", poly_path, "Polyhedron JSON")->required();

  auto* anti = app.add_subcommand("anticanonical", "Polyhedron {<nu_i, x> >= -1} of the given rays");
  anti->add_option("--rays", rays_text, "Rays as \"1,0;0,1;1,1\"")->required();

  auto* solve = app.add_subcommand("solve-bp", "Minimize the weighted volume; reports b_P");
  solve->add_option("poly", poly_path, "Polyhedron JSON")->required();
  solve->add_option("--tol", tol, "Relative gradient tolerance");

  auto* resid = app.add_subcommand("residual", "Soliton residual of a sampled symplectic potential");
  resid->add_option("poly", poly_path, "Polyhedron JSON")->required();
  resid->add_option("grid", grid_a, "Symplectic potential grid")->required();
  resid->add_option("--b", vec_text, "Soliton vector as \"b1,b2,...\"")->required();
  resid->add_flag("--subtract", subtract, "Difference u - u_P and add u_P exactly");
  resid->add_option("--out", out_path, "Write the residual grid here");

  auto* leg = app.add_subcommand("legendre", "Discrete Legendre transform of a grid");
  leg->add_option("grid", grid_a, "Input grid")->required();
  leg->add_option("--targets", axes_text, "Target slopes \"min:max:count;...\"");
  leg->add_option("--out", out_path, "Output path (stdout by default)");
  leg->add_flag("--binary", binary, "Binary payload");

  auto* adm = app.add_subcommand("admissible", "Admissibility of A = <b, x>");
  adm->add_option("poly", poly_path, "Polyhedron JSON")->required();
  adm->add_option("--A", vec_text, "Coefficients of A")->required();

  auto* scan = app.add_subcommand("ding-scan", "Ding functional along the linear path between two grids");
  scan->add_option("poly", poly_path, "Polyhedron JSON")->required();
  scan->add_option("u0", grid_a, "Start grid")->required();
  scan->add_option("u1", grid_b, "End grid")->required();
  scan->add_option("--A", vec_text, "Coefficients of the linear weight A")->required();
  scan->add_option("--samples", samples, "Time samples (>= 9)");

  auto* cat = app.add_subcommand("catalog", "Built-in examples");
  cat->require_subcommand(1);
  cat->add_subcommand("list", "List entries");
  auto* cat_run = cat->add_subcommand("run", "Self-check entries");
  cat_run->add_option("name", name, "Entry name");
  cat_run->add_flag("--all", all, "Run every entry");

  auto* sample = app.add_subcommand("sample-grid", "Sample a catalog potential on a grid");
  sample->add_option("name", name, "Entry name")->required();
  std::string kind = "u";
  sample->add_option("--kind", kind, "u (symplectic) or phi (Kahler)")->check(CLI::IsMember({"u", "phi"}));
  sample->add_option("--axes", axes_text, "Override the entry box: \"min:max:count;...\"");
  sample->add_option("--out", out_path, "Output path (stdout by default)");
  sample->add_flag("--binary", binary, "Binary payload");

  auto* fut = app.add_subcommand("futaki-profile", "Rational Futaki profile and its asymptotics");
  int fut_n = 2;
  double kappa = 3.0, tau_max = 1e4;
  std::optional<double> mu;
  std::size_t fut_samples = 200;
  fut->add_option("--n", fut_n, "Complex dimension");
  fut->add_option("--kappa", kappa, "kappa");
  fut->add_option("--mu", mu, "mu (solved from phi(0) = 0 when omitted)");
  fut->add_option("--tau-max", tau_max, "Largest tau");
  fut->add_option("--samples", fut_samples, "Number of tau samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*delzant) {
      print(to_json(is_delzant(read_polyhedron_file(poly_path))));
    } else if (*fan) {
      print(to_json(normal_fan(read_polyhedron_file(poly_path))));
    } else if (*anti) {
      print(to_json(anticanonical_polyhedron(parse_rays(rays_text))));
    } else if (*solve) {
      Polyhedron p = read_polyhedron_file(poly_path);
      const DelzantCertificate cert = is_delzant(p);
      if (!cert.delzant) throw Error(ErrorCode::NotDelzant, cert.reason);
      Json extra;
      if (auto t = anticanonical_translation(p)) {
        p = act_translate(p, *t);
        Json tj = Json::array();
        for (const auto& x : *t) tj.push_back(to_string(x));
        extra["translation"] = tj;
      } else {
        extra["translation"] = nullptr;
      }
      SolveOptions so;
      so.tol_rel = tol;
      Json j = to_json(solve_bp(p, so));
      j["translation"] = extra["translation"];
      print(j);
    } else if (*resid) {
      const Polyhedron p = read_polyhedron_file(poly_path);
      const PotentialGrid u = read_grid_file(grid_a);
      RhoOptions ro;
      if (subtract) ro.singular_reference = p;
      const ResidualField f = rho(u, check_dim(parse_vector(vec_text), u.dim(), "--b"), ro);
      if (!out_path.empty()) write_grid_file(out_path, f.residual);
      print(to_json(f));
    } else if (*leg) {
      const PotentialGrid f = read_grid_file(grid_a);
      std::optional<std::vector<GridAxis>> targets;
      if (!axes_text.empty()) targets = parse_axes(axes_text);
      emit_grid(legendre(f, targets), out_path, binary);
    } else if (*adm) {
      const Polyhedron p = read_polyhedron_file(poly_path);
      print(to_json(check_admissible(WeightA::linear(p, check_dim(parse_vector(vec_text), p.dim(), "--A")))));
    } else if (*scan) {
      const Polyhedron p = read_polyhedron_file(poly_path);
      const WeightA a = WeightA::linear(p, check_dim(parse_vector(vec_text), p.dim(), "--A"));
      print(to_json(geodesic_convexity_scan(read_grid_file(grid_a), read_grid_file(grid_b), a, samples)));
    } else if (*cat) {
      if (cat->got_subcommand("list")) {
        Json j = Json::array();
        for (const auto& e : catalog()) {
          Json ej{{"name", e.name}, {"notes", e.notes}};
          if (e.polyhedron) ej["polyhedron"] = to_json(*e.polyhedron);
          if (e.expected_b) ej["expected_b"] = to_json(*e.expected_b);
          j.push_back(ej);
        }
        print(j);
      } else {
        if (all == !name.empty()) throw UsageError("catalog run needs exactly one of <name> or --all");
        std::vector<const CatalogEntry*> entries;
        if (all)
          for (const auto& e : catalog()) entries.push_back(&e);
        else
          entries.push_back(&catalog_entry(name));
        Json j = Json::array();
        bool ok = true;
        for (const auto* e : entries) {
          const EntryReport r = run_entry(*e, seed);
          ok = ok && r.passed;
          j.push_back(to_json(r));
        }
        print(all ? Json{{"entries", j}, {"passed", ok}} : j.front());
        return ok ? 0 : 1;
      }
    } else if (*sample) {
      const CatalogEntry& e = catalog_entry(name);
      const bool is_u = kind == "u";
      const auto& fn = is_u ? e.u : e.phi;
      if (!fn) throw Error(ErrorCode::InvalidInput, "entry '" + name + "' has no closed-form " + kind);
      const std::vector<GridAxis> axes = axes_text.empty() ? (is_u ? e.u_box : e.phi_box) : parse_axes(axes_text);
      const PotentialGrid g = is_u ? PotentialGrid::sample(axes, PotentialKind::Symplectic, *fn, e.polyhedron, false)
                                   : PotentialGrid::sample(axes, PotentialKind::Kahler, *fn);
      emit_grid(g, out_path, binary);
    } else if (*fut) {
      FutakiParams p{fut_n, kappa, mu ? *mu : solve_futaki_mu(fut_n, kappa)};
      print(to_json(futaki_profile(p, tau_max, fut_samples)));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    print(error_json(e));
    return 1;
  }
  return 0;
}
