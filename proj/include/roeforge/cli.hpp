#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roeforge/suite.hpp"

namespace roeforge::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class Format { Text, Json };

struct Output {
  std::ostream& out;
  Format format;

  int report(const VerificationReport& r) const {
    if (format == Format::Json)
      out << io::report_to_json(r).dump(2) << "\n";
    else
      out << r.to_text();
    return r.ok() ? 0 : 1;
  }
};

inline std::uint64_t parse_seed(const std::string& text, const std::string& where) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); }))
    io::fail(where, "seed must be a non-negative integer, got '" + text + "'");
  try {
    return std::stoull(text);
  } catch (const std::out_of_range&) {
    io::fail(where, "seed does not fit in 64 bits");
  }
}

/// --seed, then ROEFORGE_SEED, then the fallback.
inline std::uint64_t resolve_seed(const std::optional<std::string>& flag, std::uint64_t fallback) {
  if (flag) return parse_seed(*flag, "--seed");
  if (const char* env = std::getenv("ROEFORGE_SEED"); env && *env) return parse_seed(env, "ROEFORGE_SEED");
  return fallback;
}

inline SuiteConfig load_config(const std::string& name) {
  if (name == "default") return SuiteConfig{};
  if (name == "acceptance") return SuiteConfig::acceptance();
  return config_from_json(io::load_file(name));
}

// Space references inside a file resolve relative to that file.
inline io::SpaceResolver resolver_near(const std::string& file) {
  fs::path d = fs::path(file).parent_path();
  return io::SpaceResolver(d.empty() ? fs::path(".") : d);
}

inline PointMap load_map(const std::string& file) {
  auto spaces = resolver_near(file);
  return io::map_from_json(io::load_file(file), spaces, file);
}

inline BlockMatrix load_matrix(const std::string& file) {
  auto spaces = resolver_near(file);
  return io::matrix_from_json(io::load_file(file), spaces, file);
}

inline CoarseHomotopy load_homotopy(const std::string& file) {
  auto spaces = resolver_near(file);
  return io::homotopy_from_json(io::load_file(file), spaces, file);
}

inline void require_source(const PointMap& f, const BlockMatrix& m, const std::string& where) {
  if (!(*f.source() == *m.index().outer()))
    io::fail(where, "matrix is not indexed by the source space of the map");
}

inline std::string modulus_text(const ExpansionModulus& mod) {
  std::ostringstream s;
  for (const auto& [n, v] : mod.table()) s << "    " << n << " -> " << v << "\n";
  return s.str();
}

inline json modulus_json(const ExpansionModulus& mod) {
  json t = json::array();
  for (const auto& [n, v] : mod.table()) t.push_back({n, v});
  return t;
}

// Subcommands ----------------------------------------------------------------

inline int validate_space_cmd(const Output& o, const std::string& file) {
  const FiniteMetricSpace s = io::space_from_json(io::load_file(file), file);
  return o.report(validate_metric(s).to_report(s));
}

inline int check_map_cmd(const Output& o, const std::string& file) {
  const PointMap f = load_map(file);
  VerificationReport r("map " + file);
  r.expect("map is total", true);
  const ExpansionModulus mod = expansion_modulus(f);
  r.expect("expansion modulus monotone", mod.monotone());
  const FiberProfile fib = fiber_profile(f);
  r.info("largest fiber", "max |f^-1(y)|", static_cast<double>(fib.max_cardinality));
  r.info("largest fiber diameter", "max diam f^-1(y)", fib.max_diameter);
  if (o.format == Format::Json) {
    json j = io::report_to_json(r);
    j["expansion_modulus"] = modulus_json(mod);
    o.out << j.dump(2) << "\n";
  } else {
    o.out << r.to_text() << "  expansion modulus (distance -> bound):\n" << modulus_text(mod);
  }
  return r.ok() ? 0 : 1;
}

inline int check_closeness_cmd(const Output& o, const std::string& ff, const std::string& gf,
                               std::optional<double> bound) {
  const PointMap f = load_map(ff), g = load_map(gf);
  VerificationReport r("closeness");
  bool parallel = true;
  try {
    require_parallel(f, g);
  } catch (const StructuralError& e) {
    parallel = false;
    r.expect("maps are parallel", false, e.what());
  }
  if (parallel) {
    r.expect("maps are parallel", true);
    const double dist = closeness_distance(f, g);
    if (bound)
      r.expect_le("sup dist(f(x), g(x)) within bound", dist, *bound);
    else
      r.info("sup dist(f(x), g(x))", "", dist);
  }
  return o.report(r);
}

inline int build_cylinder_cmd(const Output& o, const std::string& file, const std::vector<long long>& heights) {
  const SpacePtr base = share(io::space_from_json(io::load_file(file), file));
  if (heights.size() != base->size())
    io::fail("--p", "expected " + std::to_string(base->size()) + " heights, got " + std::to_string(heights.size()));
  const PCylinder cyl = build_cylinder(base, heights);
  if (o.format == Format::Json) {
    o.out << io::cylinder_to_json(cyl).dump(2) << "\n";
  } else {
    o.out << "cylinder over " << base->size() << " points, " << cyl.size() << " cylinder points\n";
    for (std::size_t i = 0; i < cyl.size(); ++i) o.out << "  " << cyl.space()->label(i) << "\n";
  }
  return 0;
}

inline int slice_family_cmd(const Output& o, const std::string& file, std::size_t n_max) {
  const CoarseHomotopy h = load_homotopy(file);
  const std::size_t n = std::max(n_max, h.cylinder.max_height() + 1);
  const auto family = slice_family(h, n);
  const auto stat = stationarity_indices(family);
  const FiniteMetricSpace& x = *h.base();
  if (o.format == Format::Json) {
    json slices = json::array();
    for (const PointMap& fn : family) slices.push_back(io::values_to_json(fn));
    json nj = json::object();
    for (std::size_t i = 0; i < x.size(); ++i) nj[x.label(i)] = stat[i];
    o.out << json{{"n_max", n}, {"slices", slices}, {"stationarity", nj}}.dump(2) << "\n";
  } else {
    o.out << "slices f_1 .. f_" << n << "\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      o.out << "  " << x.label(i) << ":";
      for (const PointMap& fn : family) o.out << " " << h.target()->label(fn(i));
      o.out << "   N=" << stat[i] << "\n";
    }
  }
  return 0;
}

inline int verify_family_cmd(const Output& o, const std::string& file, std::size_t n_max) {
  const CoarseHomotopy h = load_homotopy(file);
  VerificationReport r("slice family");
  const VerificationReport ends = h.check_endpoints();
  r.merge(ends);
  if (ends.ok()) r.merge(verify_family_properties(slice_family(h, std::max(n_max, h.cylinder.max_height() + 1)), h));
  return o.report(r);
}

inline int verify_pushforward_cmd(const Output& o, const std::string& mapf, const std::vector<std::string>& mats,
                                  std::uint64_t seed) {
  const PointMap f = load_map(mapf);
  const BlockMatrix a = load_matrix(mats.at(0));
  require_source(f, a, mats[0]);
  Rng rng(seed);
  BlockMatrix b = mats.size() > 1 ? load_matrix(mats[1]) : random_matrix(rng, a.index(), a.block_dim(), 0.5, 2.0);
  if (!(b.index() == a.index()) || b.block_dim() != a.block_dim())
    io::fail(mats.size() > 1 ? mats[1] : "matrix", "second matrix does not share the first one's index");
  const Complex c(rng.uniform(-2, 2), rng.uniform(-2, 2));
  return o.report(verify_pushforward(f, a, b, c));
}

inline int verify_homotopy_cmd(const Output& o, const std::optional<std::string>& homotopy,
                               const std::optional<std::string>& ff, const std::optional<std::string>& gf,
                               const std::vector<std::string>& mats, std::size_t samples, std::size_t t_count,
                               std::uint64_t seed) {
  const auto ts = t_grid(t_count);
  Rng rng(seed);
  auto sample_set = [&](const SpacePtr& x) {
    std::vector<BlockMatrix> out;
    for (const auto& file : mats) {
      out.push_back(load_matrix(file));
      if (!(*out.back().index().outer() == *x)) io::fail(file, "matrix is not indexed by the source space");
    }
    if (out.empty())
      for (std::size_t k = 0; k < samples; ++k) out.push_back(random_matrix(rng, IndexSpace(x), 2, 0.4, 2.0));
    return out;
  };
  if (homotopy) {
    if (ff || gf) io::fail("verify-homotopy", "give either --homotopy or --f/--g, not both");
    const CoarseHomotopy h = load_homotopy(*homotopy);
    return o.report(verify_homotopy_invariance(h, sample_set(h.base()), ts).report);
  }
  if (!ff || !gf) io::fail("verify-homotopy", "needs --homotopy, or both --f and --g");
  const PointMap f = load_map(*ff), g = load_map(*gf);
  require_parallel(f, g);
  VerificationReport r("closeness homotopy");
  const auto ms = sample_set(f.source());
  for (std::size_t k = 0; k < ms.size(); ++k) r.merge(verify_closeness(f, g, ms[k], ts), "sample " + std::to_string(k));
  return o.report(r);
}

inline int rot_path_cmd(const Output& o, const std::string& file, double t) {
  std::vector<Label> labels;
  const Involution inv = io::involution_from_json(io::load_file(file), &labels, file);
  const Eigen::MatrixXd m = rotation_matrix(inv, t);
  if (o.format == Format::Json) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    json lj = json::array();
    for (const auto& l : labels) lj.push_back(io::label_to_json(l));
    o.out << json{{"t", t}, {"labels", lj}, {"matrix", rows}}.dump(2) << "\n";
  } else {
    o.out << "Rot(" << t << ") on";
    for (const auto& l : labels) o.out << " " << l;
    o.out << "\n" << std::setprecision(12) << m << "\n";
  }
  return 0;
}

inline int matrix_info_cmd(const Output& o, const std::string& file) {
  const BlockMatrix m = load_matrix(file);
  const double prop = propagation(m);
  const double norm = operator_norm(m);
  const double sup = max_block_norm(m);
  const std::size_t n = schur_constant(*m.index().outer(), prop);
  const double bound = static_cast<double>(n) * sup;
  VerificationReport r("matrix " + file);
  r.info("propagation", "", prop);
  r.info("operator norm", "", norm);
  r.info("largest block norm", "", sup);
  r.info("max ball size at the propagation", "", static_cast<double>(n));
  r.expect_le("||m|| <= N(prop m) sup||b||", norm, bound, 1e-9 * std::max(1.0, bound));
  r.info("slack", "bound minus norm", bound - norm);
  return o.report(r);
}

inline int run_suite_cmd(const Output& o, const std::string& config, const std::optional<std::string>& seed_flag,
                         const std::optional<std::string>& output) {
  SuiteConfig cfg = load_config(config);
  cfg.seed = resolve_seed(seed_flag, cfg.seed);
  const SuiteResult res = run_suite(cfg);
  const std::string text = suite_to_json(cfg, res).dump(2) + "\n";
  if (output) {
    std::ofstream f(*output, std::ios::binary);
    if (!f) io::fail(*output, "cannot write the report");
    f << text;
  }
  if (o.format == Format::Json) {
    o.out << text;
  } else {
    for (const auto& s : res.sections) o.out << s.to_text();
    o.out << "suite (seed " << cfg.seed << "): " << (res.ok() ? "PASS" : "FAIL") << "\n";
  }
  return res.ok() ? 0 : 1;
}

// Entry point ----------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"roeforge: finite coarse maps, Roe algebra pushforwards and their homotopies"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  std::optional<std::string> seed;
  app.add_option("--seed", seed, "Random seed (falls back to ROEFORGE_SEED)");

  std::function<int(const Output&)> action;
  auto add = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };

  std::string file, file2;
  std::vector<std::string> files;
  std::optional<std::string> opt_a, opt_b, opt_c;
  std::optional<double> bound;
  std::vector<long long> heights;
  std::size_t n_max = 0, samples = 3, t_count = 21;
  double t = 0.0;
  std::string config = "default";

  auto* c = add("validate-space", "Check the metric axioms of a space file");
  c->add_option("file", file)->required();
  c->callback([&] { action = [&](const Output& o) { return validate_space_cmd(o, file); }; });

  c = add("check-map", "Totality, expansion modulus and fibers of a map file");
  c->add_option("file", file)->required();
  c->callback([&] { action = [&](const Output& o) { return check_map_cmd(o, file); }; });

  c = add("check-closeness", "sup distance between two parallel maps");
  c->add_option("f", file)->required();
  c->add_option("g", file2)->required();
  c->add_option("--bound", bound, "Fail if the distance exceeds this");
  c->callback([&] { action = [&](const Output& o) { return check_closeness_cmd(o, file, file2, bound); }; });

  c = add("build-cylinder", "Enumerate the p-cylinder over a space");
  c->add_option("space", file)->required();
  c->add_option("--p", heights, "Heights p(x), in label order")->required()->delimiter(',');
  c->callback([&] { action = [&](const Output& o) { return build_cylinder_cmd(o, file, heights); }; });

  c = add("slice-family", "Slices f_n of a homotopy file");
  c->add_option("homotopy", file)->required();
  c->add_option("--n-max", n_max, "Number of slices (at least 1 + max p)");
  c->callback([&] { action = [&](const Output& o) { return slice_family_cmd(o, file, n_max); }; });

  c = add("verify-family", "Check the slice family properties of a homotopy file");
  c->add_option("homotopy", file)->required();
  c->add_option("--n-max", n_max, "Number of slices (at least 1 + max p)");
  c->callback([&] { action = [&](const Output& o) { return verify_family_cmd(o, file, n_max); }; });

  c = add("verify-pushforward", "*-homomorphism, isometry and propagation checks for f_+");
  c->add_option("--map", file, "Map file")->required();
  c->add_option("--matrix", files, "One or two matrix files (a second is generated if absent)")
      ->required()
      ->expected(1, 2);
  c->callback([&] {
    action = [&](const Output& o) { return verify_pushforward_cmd(o, file, files, resolve_seed(seed, 0)); };
  });

  c = add("verify-homotopy", "Closeness homotopy of f, g, or the chained homotopy of a homotopy file");
  c->add_option("--homotopy", opt_a, "Homotopy file (chained check)");
  c->add_option("--f", opt_b, "Map file f");
  c->add_option("--g", opt_c, "Map file g");
  c->add_option("--matrix", files, "Sample matrix files (random samples if absent)");
  c->add_option("--samples", samples, "Number of random sample matrices");
  c->add_option("--t-samples", t_count, "Points of the t-grid")->check(CLI::Range(2, 100001));
  c->callback([&] {
    action = [&](const Output& o) {
      return verify_homotopy_cmd(o, opt_a, opt_b, opt_c, files, samples, t_count, resolve_seed(seed, 0));
    };
  });

  c = add("rot-path", "Print Rot_sigma(t)");
  c->add_option("--sigma", file, "Involution file")->required();
  c->add_option("--t", t, "Parameter in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  c->callback([&] { action = [&](const Output& o) { return rot_path_cmd(o, file, t); }; });

  c = add("matrix-info", "Propagation, norm and norm-bound slack of a matrix file");
  c->add_option("file", file)->required();
  c->callback([&] { action = [&](const Output& o) { return matrix_info_cmd(o, file); }; });

  c = add("run-suite", "Run every verifier over seeded random instances");
  c->add_option("--config", config, "default, acceptance, or a JSON config file");
  c->add_option("--output", opt_a, "Also write the JSON report here");
  c->callback([&] { action = [&](const Output& o) { return run_suite_cmd(o, config, seed, opt_a); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  const Output o{out, format == "json" ? Format::Json : Format::Text};
  try {
    return action(o);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace roeforge::cli
