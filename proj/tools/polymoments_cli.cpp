// polymoments command-line front end.
//
// Exit codes: 0 success / all checks pass, 1 numeric failure or failed
// check, 2 usage error (bad flags, malformed polynomial or interval).

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "polymoments/polymoments.hpp"

namespace pm = polymoments;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  std::string format = "json";
  std::string path;
};

void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", os);
  } else {
    os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

void emit(const json& j, const Output& out) {
  std::ostringstream os;
  if (out.format == "text")
    flatten(j, "", os);
  else
    os << j.dump(2) << '\n';
  if (out.path.empty()) {
    std::cout << os.str();
    return;
  }
  std::ofstream f(out.path);
  if (!f) throw pm::Error("cannot write " + out.path);
  f << os.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw pm::Error("cannot write " + path);
  return f;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(pm::detail::trim(item));
  return parts;
}

pm::GridSpec parse_box(const std::string& s, pm::GridSpec g) {
  const auto parts = split_list(s);
  if (parts.size() != 4) throw UsageError("--box expects x_lo,x_hi,y_lo,y_hi, got '" + s + "'");
  double v[4];
  for (int k = 0; k < 4; ++k) v[k] = pm::to_double(pm::parse_rational(parts[k]));
  g.x_lo = v[0];
  g.x_hi = v[1];
  g.y_lo = v[2];
  g.y_hi = v[3];
  return g;
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto parts = split_list(s);
  if (parts.size() != 2) throw UsageError("--grid expects nx,ny, got '" + s + "'");
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::exception&) {
    throw UsageError("--grid expects integers, got '" + s + "'");
  }
}

json interval_json(const pm::Interval& I) { return {pm::format_rational(I.a), pm::format_rational(I.b)}; }

json check(const std::string& name, bool pass, json detail = json::object()) {
  detail["name"] = name;
  detail["pass"] = pass;
  return detail;
}

bool all_pass(const json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c["pass"].get<bool>(); });
}

json complex_json(pm::ComplexFloat z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// ---------------------------------------------------------------------------
// verify

int verify_prop1(unsigned P, const Output& out) {
  const pm::Poly f = pm::reference::prop1_polynomial();
  const pm::Interval I = pm::reference::prop1_interval();
  const auto sn = pm::sup_norm(f, I);
  const auto cs = pm::critical_set(f, I);
  const auto est = pm::limsup_estimate(pm::moment_series(f, I, P));

  json checks = json::array();
  checks.push_back(check("sup_norm == 3 exactly", sn.exact && sn.value_sq() == 9));
  checks.push_back(check("max_abs_S == 4", std::abs(cs.max_abs - 4.0) <= 1e-9));
  checks.push_back(check("tail_max in [2.94, 3.0]", est.tail_max >= 2.94 && est.tail_max <= 3.0));
  json j{{"bundle", "prop1"},
         {"poly", pm::format_poly(f)},
         {"interval", interval_json(I)},
         {"sup_norm", sn.value},
         {"value_sq", pm::format_rational(sn.value_sq())},
         {"max_abs_S", cs.max_abs},
         {"critical_set", pm::to_json(cs)},
         {"P", P},
         {"tail_max", est.tail_max},
         {"limit_estimate", pm::to_json(est)},
         {"checks", checks},
         {"pass", all_pass(checks)}};
  emit(j, out);
  return j["pass"].get<bool>() ? kExitOk : kExitNumeric;
}

int verify_prop2(unsigned P, const Output& out) {
  const pm::Poly f = pm::reference::prop2_polynomial();
  const pm::Interval I = pm::reference::prop2_interval();
  const auto sn = pm::sup_norm(f, I);
  const auto series = pm::moment_series(f, I, std::max(P, 100u));
  json checks = json::array();
  checks.push_back(check("sup_norm == 5/4 at x = 0",
                         sn.exact && sn.value_sq() == pm::make_rational(25, 16) && std::abs(sn.argmax) <= 1e-6));

  bool real = true;
  for (unsigned p = 1; p <= 100; ++p) real = real && sgn(series.at(p).im) == 0;
  checks.push_back(check("M_p real for p <= 100", real));

  const pm::Path P_arc = pm::reference::image_parabola(), C_arc = pm::reference::deformed_circle();
  json deform = json::array();
  bool deform_ok = true;
  for (unsigned p : {1u, 5u, 10u, 20u}) {
    const auto r = pm::deformation_check(pm::WPower{p}, P_arc, C_arc, 1e-8);
    const pm::ComplexFloat exact = pm::to_float(series.at(p));
    const double scale = std::max({1e-300, std::abs(exact)});
    const double rel_p = std::abs(r.value1 - exact) / scale, rel_c = std::abs(r.value2 - exact) / scale;
    const bool ok = r.pass && rel_p <= 1e-8 && rel_c <= 1e-8;
    deform_ok = deform_ok && ok;
    deform.push_back({{"p", p},
                      {"parabola", complex_json(r.value1)},
                      {"circle", complex_json(r.value2)},
                      {"exact", pm::format_complex(series.at(p))},
                      {"rel_error_parabola", rel_p},
                      {"rel_error_circle", rel_c},
                      {"pass", ok}});
  }
  checks.push_back(check("parabola, circle and exact moments agree", deform_ok));

  const auto ml = pm::ml_bound(C_arc, pm::WPower{1});
  bool ml_ok = true;
  unsigned worst_p = 1;
  double worst_ratio = 0.0;
  for (unsigned p = 1; p <= 50; ++p) {
    const double m = std::abs(pm::to_float(series.at(p))), b = ml.at(p);
    ml_ok = ml_ok && m <= b + 1e-9 * std::max(1.0, b);
    if (m / b > worst_ratio) {
      worst_ratio = m / b;
      worst_p = p;
    }
  }
  checks.push_back(check("ML bound holds for p <= 50", ml_ok, {{"worst_ratio", worst_ratio}, {"worst_p", worst_p}}));

  const auto est = pm::limsup_estimate(pm::abs_roots(pm::moment_series(f, I, P)));
  checks.push_back(check("tail_max <= 1.0309", est.tail_max <= 1.0309));

  json j{{"bundle", "prop2"},
         {"poly", pm::format_poly(f)},
         {"interval", interval_json(I)},
         {"sup_norm", sn.value},
         {"value_sq", pm::format_rational(sn.value_sq())},
         {"argmax", sn.argmax},
         {"deformation", deform},
         {"ml_bound", pm::to_json(ml)},
         {"P", P},
         {"tail_max", est.tail_max},
         {"limit_estimate", pm::to_json(est)},
         {"checks", checks},
         {"pass", all_pass(checks)}};
  emit(j, out);
  return j["pass"].get<bool>() ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------------
// Paths

void write_reference_paths(const std::string& dir, std::size_t samples, json& files) {
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, pm::Path>> paths{{"parabola.csv", pm::reference::image_parabola()},
                                                            {"circle.csv", pm::reference::deformed_circle()},
                                                            {"l_shaped.csv", pm::reference::l_shaped_path()}};
  for (const auto& [name, path] : paths) {
    const std::string file = (std::filesystem::path(dir) / name).string();
    auto os = open_out(file);
    pm::write_path_csv(os, path, samples);
    files.push_back({{"file", file}, {"length", pm::arc_length(path)}});
  }
}

// ---------------------------------------------------------------------------
// argv preprocessing

// "--interval -1,1" would otherwise read "-1,1" as a flag; glue such values
// onto their option.
std::vector<std::string> glue_dash_values(const std::vector<std::string>& in) {
  static const std::vector<std::string> value_opts{"--poly", "--interval", "--box", "--t-grid"};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (k + 1 < in.size() && std::find(value_opts.begin(), value_opts.end(), in[k]) != value_opts.end() &&
        !in[k + 1].empty() && in[k + 1][0] == '-') {
      out.push_back(in[k] + "=" + in[k + 1]);
      ++k;
    } else {
      out.push_back(in[k]);
    }
  }
  return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = pm::detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config " + path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = pm::detail::trim(t.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    kv[key] = pm::detail::trim(t.substr(eq + 1));
  }
  return kv;
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
  }
  return std::nullopt;
}

bool flag_given(const std::vector<std::string>& args, const std::string& name) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == name || a.rfind(name + "=", 0) == 0; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact polynomial moments, limit estimates and path bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "Flat key=value file supplying defaults for any flag");

  Output out;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", out.format, "json or text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    sub->add_option("--out", out.path, "Write the report here instead of stdout");
  };

  std::string poly_s, interval_s = "-1,1";
  unsigned p_max = 200;
  auto add_poly = [&](CLI::App* sub, bool with_p) {
    sub->add_option("--poly", poly_s, "Coefficients c0,c1,...; entries like 1/2, -3i, 1/4+2i")->required();
    sub->add_option("--interval", interval_s, "a,b")->capture_default_str();
    if (with_p) sub->add_option("--p-max", p_max, "Highest moment order P")->capture_default_str();
    add_output(sub);
  };

  auto* moments = app.add_subcommand("moments", "Exact moments M_1..M_P");
  std::string csv_path;
  add_poly(moments, true);
  moments->add_option("--csv", csv_path, "Also write p,re,im,abs_root,flagged_zero rows");

  auto* limit = app.add_subcommand("limit", "Finite-tail estimate of limsup |M_p|^(1/p)");
  add_poly(limit, true);

  auto* critical = app.add_subcommand("critical-set", "Critical values and endpoint values of f");
  add_poly(critical, true);

  auto* supnorm = app.add_subcommand("supnorm", "Certified sup of |f| on the interval");
  add_poly(supnorm, false);

  auto* verify = app.add_subcommand("verify", "Run a reference reproduction bundle");
  std::string which;
  unsigned verify_p = 400;
  verify->add_option("which", which, "prop1 or prop2")->required()->check(CLI::IsMember({"prop1", "prop2"}));
  verify->add_option("--p-max", verify_p, "Highest moment order for the tail estimate")->capture_default_str();
  add_output(verify);

  auto* deform = app.add_subcommand("deform-check", "Parabola vs circle contour integral for one p");
  unsigned deform_p = 0;
  double deform_tol = 1e-8;
  std::string emit_dir;
  std::size_t samples = 401;
  deform->add_option("--p", deform_p, "Moment order")->required()->check(CLI::PositiveNumber);
  deform->add_option("--tol", deform_tol, "Relative tolerance")->capture_default_str();
  deform->add_option("--emit", emit_dir, "Directory for path CSVs");
  deform->add_option("--samples", samples, "Points per path CSV")->capture_default_str();
  add_output(deform);

  auto* paths = app.add_subcommand("paths", "Write the reference contour CSVs");
  paths->add_option("--emit", emit_dir, "Output directory")->required();
  paths->add_option("--samples", samples, "Points per path")->capture_default_str();
  add_output(paths);

  auto* minimax = app.add_subcommand("minimax-path", "Bottleneck path upper bound for L(f)");
  std::string box_s, grid_s = "512,512";
  int levels = 3;
  bool report = false;
  add_poly(minimax, true);
  minimax->add_option("--box", box_s, "x_lo,x_hi,y_lo,y_hi (default: around endpoints and critical points)");
  minimax->add_option("--grid", grid_s, "nx,ny")->capture_default_str();
  minimax->add_option("--levels", levels, "Refinement levels")->capture_default_str();
  minimax->add_option("--csv", csv_path, "Write the path as t,re,im rows");
  minimax->add_flag("--report", report, "Compare against the tail estimate at --p-max");

  auto* sweep = app.add_subcommand("kappa-sweep", "kappa records over a polynomial family");
  std::string family, t_grid_s, store_path, summary_path, timestamp, coeff_box_s = "4";
  int degree = 2;
  std::size_t count = 100;
  std::uint64_t seed = 12345;
  unsigned threads = 0;
  sweep->add_option("--family", family, "quadratic or random")->required()->check(CLI::IsMember({"quadratic", "random"}));
  sweep->add_option("--degree", degree, "Degree for the random family")->capture_default_str();
  sweep->add_option("--count", count, "Number of random polynomials")->capture_default_str();
  sweep->add_option("--seed", seed, "RNG seed for the random family")->capture_default_str();
  sweep->add_option("--box", coeff_box_s, "Coefficient box: parts uniform in [-box, box]")->capture_default_str();
  sweep->add_option("--t-grid", t_grid_s, "Comma-separated t values in (0,1] (default k/16, k = 1..16)");
  sweep->add_option("--p-max", p_max, "Highest moment order P")->capture_default_str();
  sweep->add_option("--grid", grid_s, "nx,ny")->capture_default_str();
  sweep->add_option("--levels", levels, "Refinement levels")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  sweep->add_option("--jsonl", store_path, "Append-only record store; existing records are reused");
  sweep->add_option("--summary", summary_path, "Also write the summary JSON here");
  sweep->add_option("--timestamp", timestamp, "Timestamp stamped on new records (default: now, UTC)");
  add_output(sweep);

  std::vector<std::string> args = glue_dash_values(std::vector<std::string>(argv + 1, argv + argc));
  try {
    if (auto cfg = find_config(args)) {
      CLI::App* sub = nullptr;
      for (const auto& a : args)
        if (auto* s = app.get_subcommand_no_throw(a)) {
          sub = s;
          break;
        }
      if (sub)
        for (const auto& [key, value] : read_config(*cfg)) {
          const std::string flag = "--" + key;
          if (key == "config" || flag_given(args, flag)) continue;
          if (sub->get_option_no_throw(flag)) args.push_back(flag + "=" + value);
        }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    auto poly = [&] { return pm::parse_poly(poly_s); };
    auto interval = [&] {
      try {
        return pm::parse_interval(interval_s);
      } catch (const pm::DomainError& e) {
        throw UsageError(std::string("--interval: ") + e.what());
      }
    };

    if (*moments) {
      const pm::Poly f = poly();
      const pm::Interval I = interval();
      const auto s = pm::moment_series(f, I, p_max);
      if (!csv_path.empty()) {
        auto os = open_out(csv_path);
        pm::write_moments_csv(os, s);
      }
      emit(pm::to_json(s), out);
      return kExitOk;
    }
    if (*limit) {
      const pm::Poly f = poly();
      const pm::Interval I = interval();
      json j = pm::to_json(pm::limsup_estimate(pm::moment_series(f, I, p_max)));
      j["poly"] = pm::format_poly(f);
      j["interval"] = interval_json(I);
      j["P"] = p_max;
      emit(j, out);
      return kExitOk;
    }
    if (*critical) {
      const pm::Poly f = poly();
      const pm::Interval I = interval();
      json j = pm::to_json(pm::critical_set(f, I));
      j["max_abs_S"] = j["max_abs"];
      j["tail_max"] = pm::limsup_estimate(pm::moment_series(f, I, p_max)).tail_max;
      j["P"] = p_max;
      j["poly"] = pm::format_poly(f);
      j["interval"] = interval_json(I);
      emit(j, out);
      return kExitOk;
    }
    if (*supnorm) {
      const pm::Poly f = poly();
      const pm::Interval I = interval();
      json j = pm::to_json(pm::sup_norm(f, I));
      j["poly"] = pm::format_poly(f);
      j["interval"] = interval_json(I);
      emit(j, out);
      return kExitOk;
    }
    if (*verify) return which == "prop1" ? verify_prop1(verify_p, out) : verify_prop2(verify_p, out);
    if (*deform) {
      const auto r = pm::deformation_check(pm::WPower{deform_p}, pm::reference::image_parabola(),
                                           pm::reference::deformed_circle(), deform_tol);
      const auto exact = pm::moment_exact(pm::reference::prop2_polynomial(), pm::reference::prop2_interval(), deform_p);
      const pm::ComplexFloat ex = pm::to_float(exact);
      const double scale = std::max(1e-300, std::abs(ex));
      const double rel_p = std::abs(r.value1 - ex) / scale, rel_c = std::abs(r.value2 - ex) / scale;
      const bool pass = r.pass && rel_p <= deform_tol && rel_c <= deform_tol;
      json j{{"p", deform_p},
             {"parabola", complex_json(r.value1)},
             {"circle", complex_json(r.value2)},
             {"exact", pm::format_complex(exact)},
             {"difference", r.difference},
             {"rel_error_parabola", rel_p},
             {"rel_error_circle", rel_c},
             {"tolerance", deform_tol},
             {"ml_bound", pm::ml_bound(pm::reference::deformed_circle(), pm::WPower{deform_p}).at(deform_p)},
             {"pass", pass}};
      if (!emit_dir.empty()) {
        json files = json::array();
        write_reference_paths(emit_dir, samples, files);
        j["files"] = files;
      }
      emit(j, out);
      return pass ? kExitOk : kExitNumeric;
    }
    if (*paths) {
      json files = json::array();
      write_reference_paths(emit_dir, samples, files);
      emit({{"files", files}, {"samples", samples}}, out);
      return kExitOk;
    }
    if (*minimax) {
      const pm::Poly f = poly();
      const pm::Interval I = interval();
      const auto [nx, ny] = parse_grid(grid_s);
      const pm::ComplexFloat a(pm::to_double(I.a), 0.0), b(pm::to_double(I.b), 0.0);
      pm::GridSpec grid = pm::default_grid(f, a, b, nx, ny);
      if (!box_s.empty()) grid = parse_box(box_s, grid);
      const auto pb = pm::minimax_path(f, a, b, grid, levels);
      json j = pm::to_json(pb);
      j["grid"] = pm::to_json(grid);
      j["poly"] = pm::format_poly(f);
      j["interval"] = interval_json(I);
      j["sup_norm"] = pm::sup_norm(f, I).value;
      if (report) j["report"] = pm::to_json(pm::bound_report(f, I, pb, pm::moment_series(f, I, p_max)));
      if (!csv_path.empty()) {
        auto os = open_out(csv_path);
        pm::write_path_csv(os, pb.path, pb.path.points.size());
      }
      emit(j, out);
      return kExitOk;
    }
    if (*sweep) {
      const auto [nx, ny] = parse_grid(grid_s);
      pm::SweepConfig cfg;
      cfg.kappa.P = p_max;
      cfg.kappa.nx = nx;
      cfg.kappa.ny = ny;
      cfg.kappa.levels = levels;
      cfg.threads = threads;
      cfg.timestamp = timestamp;
      if (!store_path.empty()) cfg.store_path = store_path;
      pm::SweepSummary s;
      if (family == "quadratic") {
        std::vector<pm::BigRational> ts;
        if (t_grid_s.empty())
          for (long k = 1; k <= 16; ++k) ts.push_back(pm::make_rational(k, 16));
        else
          for (const auto& t : split_list(t_grid_s)) ts.push_back(pm::parse_rational(t));
        s = pm::quadratic_family_sweep(ts, cfg);
      } else {
        s = pm::random_sweep(degree, count, pm::parse_rational(coeff_box_s), seed, cfg);
      }
      json j = pm::to_json(s);
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& r : s.records) {
        lo = std::min(lo, r.kappa_upper);
        hi = std::max(hi, r.kappa_upper);
      }
      j["kappa_upper_range"] = {lo, hi};
      if (!store_path.empty()) j["jsonl"] = store_path;
      if (!summary_path.empty()) {
        auto os = open_out(summary_path);
        os << j.dump(2) << '\n';
      }
      emit(j, out);
      return kExitOk;
    }
  } catch (const pm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
