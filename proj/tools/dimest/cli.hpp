#pragma once

// dimest command line. run() is the whole program minus process plumbing so the
// tests can drive it in-process.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "dimest/dimest.hpp"

namespace dimest::cli {

inline constexpr const char* kVersion = "0.1.0";

enum Exit : int { ok = 0, failure = 1, usage = 2, saturated = 3, asymmetric = 4, disagree = 5 };

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

/// "0,3,5-9" -> {0,3,5,6,7,8,9}. Ranges are inclusive.
inline std::vector<std::size_t> parse_axes(const std::string& text) {
  std::vector<std::size_t> out;
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw CLI::ValidationError("--axes", "bad axis list: " + text);
    return v;
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(number(item));
    } else {
      const std::size_t a = number(item.substr(0, dash)), b = number(item.substr(dash + 1));
      if (b < a) throw CLI::ValidationError("--axes", "descending range in " + text);
      for (std::size_t k = a; k <= b; ++k) out.push_back(k);
    }
  }
  return out;
}

struct InputOptions {
  std::string path;
  std::string format;  // "", "csv", "binary"
  std::string axes;
  std::size_t step = 1;
  std::optional<std::size_t> limit;
};

struct LoadedInput {
  PointCloud cloud;
  std::string digest;
};

inline LoadedInput load_input(const InputOptions& in) {
  const std::string bytes = dimest::detail::read_file(in.path);
  const CloudFormat format = in.format.empty() ? format_from_path(in.path)
                             : in.format == "csv" ? CloudFormat::csv
                                                  : CloudFormat::binary;
  PointCloud cloud = format == CloudFormat::csv ? parse_csv(bytes, in.path) : parse_binary(bytes, in.path);
  if (!in.axes.empty()) cloud = project_axes(cloud, AxisProjection{parse_axes(in.axes), cloud.label()});
  if (in.step != 1 || in.limit) cloud = subsample(cloud, in.step, in.limit);
  return {std::move(cloud), sha256_hex(bytes)};
}

inline Json input_json(const InputOptions& in) {
  Json j{{"path", in.path}, {"format", in.format.empty() ? "auto" : in.format}, {"axes", in.axes}, {"step", in.step}};
  j["limit"] = in.limit ? Json(*in.limit) : Json(nullptr);
  return j;
}

inline void add_input(CLI::App* app, InputOptions& in) {
  app->add_option("input", in.path, "point cloud file (.csv or binary)")->required();
  app->add_option("--input-format", in.format, "override format detection")
      ->check(CLI::IsMember({"csv", "binary"}));
  app->add_option("--axes", in.axes, "keep only these columns, e.g. 0-299 or 0,2,5");
  app->add_option("--step", in.step, "take every step-th row")->check(CLI::PositiveNumber);
  app->add_option("--limit", in.limit, "keep at most this many rows after stepping");
}

struct SweepOptions {
  std::optional<double> r_min, r_max;
  std::size_t steps = 32;
  std::size_t min_window = 5;
};

inline void add_sweep(CLI::App* app, SweepOptions& s) {
  app->add_option("--r-min", s.r_min, "smallest box side / radius")->check(CLI::PositiveNumber);
  app->add_option("--r-max", s.r_max, "largest box side / radius")->check(CLI::PositiveNumber);
  app->add_option("--steps", s.steps, "number of radii")->check(CLI::Range(8, 100000));
  app->add_option("--min-window", s.min_window, "minimum fit window")->check(CLI::Range(4, 100000));
}

inline Json sweep_json(const SweepOptions& s) {
  Json j;
  j["r_min"] = s.r_min ? Json(*s.r_min) : Json(nullptr);
  j["r_max"] = s.r_max ? Json(*s.r_max) : Json(nullptr);
  j["steps"] = s.steps;
  j["min_window"] = s.min_window;
  return j;
}

struct Options {
  InputOptions input;
  SweepOptions sweep;
  std::string correction = "occupancy";
  std::size_t min_collisions = 50;
  std::size_t anchor_trials = 1;
  bool no_flatten = false;
  unsigned n_min = 1, n_max = 64;
  double moment_tol = 0.2;
  std::size_t symmetry_dirs = 1000;
  double symmetry_threshold = 0.05;
  std::size_t max_points = 20000;
  double min_neighbors = 1.0;
  double agree_tol = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out;

  // generate
  std::string kind;
  std::size_t d = 0, big_d = 0, n = 0;
  bool identity = false;
  std::string out_format;
};

inline BoxCountConfig box_config(const Options& o) {
  BoxCountConfig c;
  c.r_max = o.sweep.r_max;
  c.r_min = o.sweep.r_min;
  c.steps = o.sweep.steps;
  c.min_window = o.sweep.min_window;
  c.correction = o.correction == "none" ? CountCorrection::none : CountCorrection::occupancy;
  c.min_collisions = o.min_collisions;
  c.anchor_trials = o.anchor_trials;
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

inline ProbabilisticConfig prob_config(const Options& o) {
  ProbabilisticConfig c;
  c.flatten = !o.no_flatten;
  c.n_min = o.n_min;
  c.n_max = o.n_max;
  c.moment_tolerance = o.moment_tol;
  c.symmetry_directions = o.symmetry_dirs;
  c.symmetry_threshold = o.symmetry_threshold;
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

inline Json box_config_json(const Options& o) {
  Json j = sweep_json(o.sweep);
  j["correction"] = o.correction;
  j["min_collisions"] = o.min_collisions;
  j["anchor_trials"] = o.anchor_trials;
  return j;
}

inline Json prob_config_json(const Options& o) {
  return Json{{"flatten", !o.no_flatten},        {"n_min", o.n_min},
              {"n_max", o.n_max},                {"moment_tol", o.moment_tol},
              {"symmetry_dirs", o.symmetry_dirs}, {"symmetry_threshold", o.symmetry_threshold}};
}

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string slope_summary(const SlopeFit& fit) {
  return "dimension ≈ " + fixed(fit.slope, 4) + " (r²=" + fixed(fit.r_squared, 4) + ", window=[" +
         std::to_string(fit.first) + "," + std::to_string(fit.last) + "])";
}

inline std::string scan_summary(const DimensionScanResult& scan) {
  std::string s = "selected n = " + (scan.selected_n ? std::to_string(*scan.selected_n) : std::string("none")) +
                  " (confidence=" + std::string(to_string(scan.confidence)) + ")";
  if (!scan.warnings.empty()) {
    s += " warnings:";
    for (auto w : scan.warnings) s += " " + std::string(to_string(w));
  }
  return s;
}

/// Writes the result document and, next to it, the run manifest.
inline void emit(const Options& o, const std::string& command, const Json& config, const std::string& digest,
                 const Json& result, std::chrono::steady_clock::time_point start) {
  if (o.out.empty()) return;
  dimest::detail::write_file(o.out, dump(result));
  Json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["seed"] = o.seed;
  manifest["rng"] = std::string(RandomSource::algorithm_id);
  manifest["threads"] = resolve_threads(o.threads);
  manifest["input_sha256"] = digest;
  manifest["tool_version"] = kVersion;
  manifest["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  dimest::detail::write_file(o.out + ".manifest.json", dump(manifest));
}

inline GeneratorKind parse_kind(const std::string& s) {
  if (s == "swiss-roll" || s == "swiss_roll") return GeneratorKind::swiss_roll;
  if (s == "linear" || s == "linear-embed" || s == "linear_embed") return GeneratorKind::linear_embed;
  if (s == "cube" || s == "unit-cube" || s == "unit_cube") return GeneratorKind::unit_cube;
  if (s == "sphere" || s == "sphere-surface" || s == "sphere_surface") return GeneratorKind::sphere_surface;
  throw ValidationError("unknown generator kind '" + s + "'");
}

inline int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  GeneratorSpec spec;
  try {
    spec.kind = parse_kind(o.kind);
    spec.n_samples = o.n;
    spec.seed = o.seed;
    spec.identity_embedding = o.identity;
    switch (spec.kind) {
      case GeneratorKind::swiss_roll:
        spec.intrinsic_dim = o.d ? o.d : 2;
        spec.ambient_dim = o.big_d ? o.big_d : 3;
        break;
      case GeneratorKind::unit_cube:
        spec.intrinsic_dim = o.d ? o.d : (o.big_d ? o.big_d : 2);
        spec.ambient_dim = o.big_d ? o.big_d : spec.intrinsic_dim;
        break;
      case GeneratorKind::sphere_surface:
        spec.ambient_dim = o.big_d ? o.big_d : (o.d ? o.d + 1 : 3);
        spec.intrinsic_dim = o.d ? o.d : spec.ambient_dim - 1;
        break;
      case GeneratorKind::linear_embed:
        if (!o.d || !o.big_d) throw ValidationError("linear embedding needs --d and --D");
        spec.intrinsic_dim = o.d;
        spec.ambient_dim = o.big_d;
        break;
    }
    spec.validate();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
  const PointCloud cloud = generate(spec);
  const CloudFormat format = o.out_format.empty() ? format_from_path(o.out)
                             : o.out_format == "csv" ? CloudFormat::csv
                                                     : CloudFormat::binary;
  save_cloud(cloud, o.out, format);
  Json manifest;
  manifest["command"] = "generate";
  manifest["config"] = to_json(spec);
  manifest["seed"] = o.seed;
  manifest["rng"] = std::string(RandomSource::algorithm_id);
  manifest["output_sha256"] =
      sha256_hex(format == CloudFormat::csv ? format_csv(cloud) : format_binary(cloud));
  manifest["tool_version"] = kVersion;
  manifest["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  dimest::detail::write_file(o.out + ".manifest.json", dump(manifest));
  out << "generated " << cloud.size() << " points in R^" << cloud.ambient_dim() << " -> " << o.out << "\n";
  return ok;
}

inline int cmd_minkowski(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = load_input(o.input);
  const auto est = estimate_minkowski(in.cloud, box_config(o));
  emit(o, "minkowski", Json{{"input", input_json(o.input)}, {"minkowski", box_config_json(o)}}, in.digest,
       to_json(est), start);
  out << slope_summary(est.fit) << "\n";
  return ok;
}

inline int cmd_probabilistic(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = load_input(o.input);
  const auto result = estimate_probabilistic(in.cloud, prob_config(o));
  emit(o, "probabilistic", Json{{"input", input_json(o.input)}, {"probabilistic", prob_config_json(o)}}, in.digest,
       to_json(result), start);
  out << scan_summary(result.scan) << "\n";
  return ok;
}

inline int cmd_correlation(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = load_input(o.input);
  CorrelationConfig c;
  c.r_max = o.sweep.r_max;
  c.r_min = o.sweep.r_min;
  c.steps = o.sweep.steps;
  c.min_window = o.sweep.min_window;
  c.max_points = o.max_points;
  c.min_mean_neighbors = o.min_neighbors;
  c.seed = o.seed;
  c.threads = o.threads;
  const auto curve = estimate_correlation_dimension(in.cloud, c);
  Json config = sweep_json(o.sweep);
  config["max_points"] = o.max_points;
  config["min_neighbors"] = o.min_neighbors;
  emit(o, "correlation", Json{{"input", input_json(o.input)}, {"correlation", config}}, in.digest, to_json(curve),
       start);
  out << slope_summary(curve.fit) << "\n";
  return ok;
}

inline int cmd_crosscheck(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto in = load_input(o.input);
  const auto est = estimate_minkowski(in.cloud, box_config(o));
  const auto prob = estimate_probabilistic(in.cloud, prob_config(o));
  out << slope_summary(est.fit) << "\n" << scan_summary(prob.scan) << "\n";
  if (!prob.scan.selected_n) throw Error("probabilistic scan selected no dimension");
  const double gap = std::abs(est.dimension - static_cast<double>(*prob.scan.selected_n));
  const bool agree = gap <= o.agree_tol;
  Json result;
  result["method"] = "crosscheck";
  result["minkowski"] = to_json(est);
  result["probabilistic"] = to_json(prob);
  result["gap"] = gap;
  result["agree_tol"] = o.agree_tol;
  result["verdict"] = agree ? "agree" : "disagree";
  Json config{{"input", input_json(o.input)},
              {"minkowski", box_config_json(o)},
              {"probabilistic", prob_config_json(o)},
              {"agree_tol", o.agree_tol}};
  emit(o, "crosscheck", config, in.digest, result, start);
  out << "verdict: " << (agree ? "agree" : "disagree") << " (|" << fixed(est.dimension, 4) << " - "
      << *prob.scan.selected_n << "| = " << fixed(gap, 4) << ", tol " << fixed(o.agree_tol, 4) << ")\n";
  return agree ? ok : disagree;
}

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"intrinsic dimension of point clouds", "dimest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)")->envname("DIMEST_THREADS");
  };
  auto box_flags = [&](CLI::App* sub) {
    sub->add_option("--correction", o.correction, "count correction")->check(CLI::IsMember({"occupancy", "none"}));
    sub->add_option("--min-collisions", o.min_collisions, "occupancy fit needs N - N(r) >= this");
    sub->add_option("--anchor-trials", o.anchor_trials, "minimum over this many shifted grids")
        ->check(CLI::PositiveNumber);
  };
  auto prob_flags = [&](CLI::App* sub) {
    sub->add_flag("--no-flatten", o.no_flatten, "skip the symmetry check and flattening");
    sub->add_option("--n-min", o.n_min, "smallest candidate dimension")->check(CLI::PositiveNumber);
    sub->add_option("--n-max", o.n_max, "largest candidate dimension")->check(CLI::PositiveNumber);
    sub->add_option("--moment-tol", o.moment_tol, "tolerance on |A1^2/A2 - 1|")->check(CLI::PositiveNumber);
    sub->add_option("--symmetry-dirs", o.symmetry_dirs, "random directions for the symmetry check")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    sub->add_option("--symmetry-threshold", o.symmetry_threshold, "max two-sample K-S for symmetry")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto out_flag = [&](CLI::App* sub) { sub->add_option("--out", o.out, "result JSON path"); };

  auto* gen = app.add_subcommand("generate", "write a synthetic cloud");
  gen->add_option("--kind", o.kind, "swiss-roll | linear | cube | sphere")->required();
  gen->add_option("--n", o.n, "number of points")->required();
  gen->add_option("--d", o.d, "intrinsic dimension");
  gen->add_option("--D", o.big_d, "ambient dimension");
  gen->add_flag("--identity", o.identity, "linear: use Q = I (needs d = D)");
  gen->add_option("--format", o.out_format, "output format")->check(CLI::IsMember({"csv", "binary"}));
  gen->add_option("--out", o.out, "output path")->required();
  common(gen);

  auto* mink = app.add_subcommand("minkowski", "box-counting dimension");
  add_input(mink, o.input);
  add_sweep(mink, o.sweep);
  box_flags(mink);
  out_flag(mink);
  common(mink);

  auto* prob = app.add_subcommand("probabilistic", "nearest-neighbour exponentiality scan");
  add_input(prob, o.input);
  prob_flags(prob);
  out_flag(prob);
  common(prob);

  auto* corr = app.add_subcommand("correlation", "Grassberger-Procaccia correlation dimension");
  add_input(corr, o.input);
  add_sweep(corr, o.sweep);
  corr->add_option("--max-points", o.max_points, "subsample larger clouds to this size")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  corr->add_option("--min-neighbors", o.min_neighbors, "fit only radii with this mean neighbour count")
      ->check(CLI::NonNegativeNumber);
  out_flag(corr);
  common(corr);

  auto* cross = app.add_subcommand("crosscheck", "run both estimators and compare");
  add_input(cross, o.input);
  add_sweep(cross, o.sweep);
  box_flags(cross);
  prob_flags(cross);
  cross->add_option("--agree-tol", o.agree_tol, "agreement band in dimension units")->check(CLI::NonNegativeNumber);
  out_flag(cross);
  common(cross);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (o.sweep.r_min && o.sweep.r_max && !(*o.sweep.r_min < *o.sweep.r_max))
      throw CLI::ValidationError("--r-min", "--r-min must be smaller than --r-max");
    if (o.n_min > o.n_max) throw CLI::ValidationError("--n-min", "--n-min must not exceed --n-max");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return usage;
  }

  try {
    if (*gen) return cmd_generate(o, out, err);
    if (*mink) return cmd_minkowski(o, out);
    if (*prob) return cmd_probabilistic(o, out);
    if (*corr) return cmd_correlation(o, out);
    if (*cross) return cmd_crosscheck(o, out);
  } catch (const SaturationError& e) {
    err << "error: " << e.what() << "\n";
    return saturated;
  } catch (const SymmetryError& e) {
    err << "error: " << e.what() << "\n";
    return asymmetric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failure;
  }
  return usage;
}

}  // namespace dimest::cli
