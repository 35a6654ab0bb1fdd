#include "normal_approx/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "normal_approx/approx.hpp"
#include "normal_approx/compact_split.hpp"
#include "normal_approx/io.hpp"

namespace normal_approx::cli {

using nlohmann::json;

namespace {

constexpr const char* kCsvHeader = "trial,n,k,lhs,rhs,ratio,schur_residual,verdict,wall_ms";

// Command-specific columns appended after the stable ones.
std::string extra_header(Command c) {
  switch (c) {
    case Command::fraas: return "gram_spread,max_normality_defect";
    case Command::split:
      return "qn_dim,n_dim,expected_qn_dim,expected_n_dim,invariance_defect,orthogonality_defect,"
             "max_qn_spectral_radius,max_hn_normality_defect";
    case Command::spread: return "spread,theta_star,grid_points";
    case Command::counterexample:
      return "gram_identity_defect,normality_defect_1,normality_defect_2,commutator_defect,family_rejected";
    default: return "";
  }
}

enum class TrialStatus { ok, failed, error };

struct TrialRecord {
  long trial = 0;
  long n = 0;
  long k = 0;
  std::optional<double> lhs, rhs, ratio, schur_residual;
  bool verdict = false;
  TrialStatus status = TrialStatus::ok;
  double wall_ms = 0.0;
  std::vector<std::string> extras;
  json detail = json::object();
  std::string error;
};

std::string fmt(double x) { return io::format_double(x); }
std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

std::string fixed_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

const char* status_name(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::failed: return "failed";
    case TrialStatus::error: return "error";
  }
  return "error";
}

json optional_json(const std::optional<double>& x) {
  return x && std::isfinite(*x) ? json(*x) : json(nullptr);
}

std::string csv_row(const TrialRecord& r) {
  std::ostringstream os;
  os << r.trial << ',' << r.n << ',' << r.k << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ','
     << fmt(r.ratio) << ',' << fmt(r.schur_residual) << ','
     << (r.status == TrialStatus::error ? "error" : (r.verdict ? "true" : "false")) << ','
     << fixed_ms(r.wall_ms);
  for (const auto& e : r.extras) os << ',' << e;
  return os.str();
}

json record_json(const TrialRecord& r) {
  json j = {{"trial", r.trial},
            {"n", r.n},
            {"k", r.k},
            {"lhs", optional_json(r.lhs)},
            {"rhs", optional_json(r.rhs)},
            {"ratio", optional_json(r.ratio)},
            {"schur_residual", optional_json(r.schur_residual)},
            {"verdict", r.verdict},
            {"status", status_name(r.status)},
            {"wall_ms", r.wall_ms},
            {"detail", r.detail}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

GeneratorKind default_generator(Command c) {
  switch (c) {
    case Command::fraas: return GeneratorKind::planted_normal_scalar_sum;
    case Command::split: return GeneratorKind::nilpotent_plus_normal;
    default: return GeneratorKind::poly_in_one;
  }
}

long draw(const IntRange& r, SplitMix64& rng) {
  return r.lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(r.hi - r.lo + 1)));
}

// The trial's generator spec; n, k and the split sizes are drawn from the
// configured ranges with a stream derived from (seed, trial).
GeneratorSpec trial_spec(const ExperimentConfig& c, long trial) {
  SplitMix64 rng(derive_seed(c.seed, static_cast<std::uint64_t>(trial)));
  GeneratorSpec spec;
  spec.kind = c.generator.value_or(default_generator(c.command));
  spec.n = draw(c.n, rng);
  spec.k = static_cast<std::size_t>(draw(c.k, rng));
  spec.n_qn = draw(c.n_qn, rng);
  spec.n_n = draw(c.n_n, rng);
  if (spec.kind == GeneratorKind::nilpotent_plus_normal) spec.n = spec.n_qn + spec.n_n;
  spec.seed = rng.next();
  spec.scale = c.scale;
  return spec;
}

struct TrialInput {
  std::vector<ComplexMatrix> members;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> split_dims;
  bool single_matrix = false;  // input file held a bare matrix
};

void fill_bound(TrialRecord& r, const BoundReport& b) {
  r.lhs = b.lhs_unnormalized;
  r.rhs = b.rhs_unnormalized;
  r.ratio = b.ratio_infinite ? std::numeric_limits<double>::infinity() : b.ratio;
  r.schur_residual = b.schur_residual;
}

BoundOptions bound_options(const Tolerances& t) {
  return {t.spread_grid, t.spread_refinement, t.schur};
}

void run_certify(const ExperimentConfig& c, const TrialInput& in, TrialRecord& r) {
  const MatrixFamily family(in.members, c.tolerances.commutation);
  const BoundReport b = certify_bound(family, bound_options(c.tolerances));
  fill_bound(r, b);
  r.verdict = b.certified;
  r.detail = io::to_json(b);
}

void run_fraas(const ExperimentConfig& c, const TrialInput& in, TrialRecord& r) {
  const MatrixFamily family(in.members, c.tolerances.commutation);
  const NormalityReport rep = fraas_check(family, c.tolerances.normality, c.tolerances.spread_grid);
  const BoundReport b = certify_bound(family, bound_options(c.tolerances));
  fill_bound(r, b);
  r.verdict = rep.verdict;
  const double max_defect = rep.normality_defects.empty()
                                ? 0.0
                                : *std::max_element(rep.normality_defects.begin(),
                                                    rep.normality_defects.end());
  r.extras = {fmt(rep.gram_spread), fmt(max_defect)};
  r.detail = {{"normality", io::to_json(rep)}, {"bound", io::to_json(b)}};
}

void run_split(const ExperimentConfig& c, const TrialInput& in, TrialRecord& r) {
  const MatrixFamily family(in.members, c.tolerances.commutation);
  const SplitResult s = split(family, c.tolerances.kernel);
  const double scale = std::max(1.0, family.max_member_norm());
  const double max_radius =
      s.qn_spectral_radii.empty() ? 0.0 : *std::max_element(s.qn_spectral_radii.begin(), s.qn_spectral_radii.end());
  const double max_normality =
      s.normality_defects_on_hn.empty()
          ? 0.0
          : *std::max_element(s.normality_defects_on_hn.begin(), s.normality_defects_on_hn.end());
  bool ok = s.invariance_defect <= c.tolerances.normality * scale &&
            max_normality <= c.tolerances.normality * scale &&
            max_radius <= kQuasiNilpotentThreshold * scale;
  std::string eq, en;
  if (in.split_dims) {
    ok = ok && s.qn_dim() == in.split_dims->first && s.n_dim() == in.split_dims->second;
    eq = std::to_string(in.split_dims->first);
    en = std::to_string(in.split_dims->second);
  }
  r.verdict = ok;
  r.extras = {std::to_string(s.qn_dim()), std::to_string(s.n_dim()), eq, en,
              fmt(s.invariance_defect), fmt(s.orthogonality_defect), fmt(max_radius),
              fmt(max_normality)};
  json d = io::to_json(s);
  d["scale"] = scale;
  if (in.split_dims) d["expected"] = {in.split_dims->first, in.split_dims->second};
  r.detail = std::move(d);
}

void run_spread(const ExperimentConfig& c, const TrialInput& in, TrialRecord& r) {
  // A single matrix is measured directly; a family through its gram sum.
  const ComplexMatrix target =
      in.single_matrix ? in.members.front() : gram_sum(std::span<const ComplexMatrix>(in.members));
  const SpreadResult s = numerical_spread(target, c.tolerances.spread_grid, c.tolerances.spread_refinement);
  r.verdict = true;
  r.extras = {fmt(s.spread), fmt(s.theta_star), std::to_string(s.grid_points)};
  r.detail = io::to_json(s);
}

void run_counterexample(TrialRecord& r) {
  const auto [a1, a2] = cholesky_counterexample();
  const ComplexMatrix gram = a1.adjoint() * a1 + a2.adjoint() * a2;
  const double identity_defect = (gram - ComplexMatrix::Identity(2, 2)).norm();
  const double d1 = normality_defect(a1);
  const double d2 = normality_defect(a2);
  const double comm = commutator_defect(a1, a2);
  bool rejected = false;
  std::string rejection;
  try {
    MatrixFamily family({a1, a2});
  } catch (const NonCommutingFamily& e) {
    rejected = true;
    rejection = e.what();
  }
  r.n = 2;
  r.k = 2;
  r.verdict = rejected && identity_defect <= 1e-15 && std::abs(d1 - 1.0) <= 1e-12 &&
              std::abs(d2 - 1.0) <= 1e-12 && std::abs(comm - 1.0) <= 1e-12;
  r.extras = {fmt(identity_defect), fmt(d1), fmt(d2), fmt(comm), rejected ? "true" : "false"};
  r.detail = {{"A1", io::matrix_to_json(a1)},
              {"A2", io::matrix_to_json(a2)},
              {"gram_sum", io::matrix_to_json(gram)},
              {"gram_identity_defect", identity_defect},
              {"normality_defects", {d1, d2}},
              {"commutator_defect", comm},
              {"family_rejected", rejected},
              {"rejection", rejection}};
}

TrialRecord run_trial(const ExperimentConfig& c, long trial, const std::optional<TrialInput>& fixed) {
  TrialRecord r;
  r.trial = trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (c.command == Command::counterexample) {
      run_counterexample(r);
    } else {
      TrialInput in;
      if (fixed) {
        in = *fixed;
      } else {
        const GeneratorSpec spec = trial_spec(c, trial);
        GeneratedFamily g = generate(spec);
        in.members = std::move(g.members);
        in.split_dims = g.split_dims;
        r.detail["generator"] = io::to_json(spec);
      }
      r.n = static_cast<long>(in.members.front().rows());
      r.k = static_cast<long>(in.members.size());
      json gen_detail = r.detail.contains("generator") ? r.detail["generator"] : json();
      switch (c.command) {
        case Command::certify: run_certify(c, in, r); break;
        case Command::fraas: run_fraas(c, in, r); break;
        case Command::split: run_split(c, in, r); break;
        case Command::spread: run_spread(c, in, r); break;
        default: break;
      }
      if (!gen_detail.is_null()) r.detail["generator"] = gen_detail;
    }
    r.status = r.verdict ? TrialStatus::ok : TrialStatus::failed;
  } catch (const Error& e) {
    r.status = TrialStatus::error;
    r.verdict = false;
    r.error = e.what();
  }
  const auto stop = std::chrono::steady_clock::now();
  r.wall_ms = c.suppress_timestamp
                  ? 0.0
                  : std::round(std::chrono::duration<double, std::milli>(stop - start).count() * 1000.0) /
                        1000.0;
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json summarize(const ExperimentConfig& c, const std::vector<TrialRecord>& records) {
  std::vector<double> ratios;
  long failures = 0;
  long errors = 0;
  for (const auto& r : records) {
    if (r.status == TrialStatus::failed) ++failures;
    if (r.status == TrialStatus::error) ++errors;
    if (r.ratio && std::isfinite(*r.ratio)) ratios.push_back(*r.ratio);
  }
  json s = {{"command", std::string(to_string(c.command))},
            {"trials", static_cast<long>(records.size())},
            {"failures", failures},
            {"solver_failures", errors},
            {"ratio_min", nullptr},
            {"ratio_median", nullptr},
            {"ratio_max", nullptr}};
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const std::size_t m = ratios.size();
    s["ratio_min"] = ratios.front();
    s["ratio_max"] = ratios.back();
    s["ratio_median"] = m % 2 == 1 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
  }
  if (!c.suppress_timestamp) s["timestamp"] = utc_timestamp();
  return s;
}

std::optional<TrialInput> load_input(const ExperimentConfig& c) {
  if (c.input.empty()) return std::nullopt;
  const json j = io::read_json_file(c.input);
  TrialInput in;
  if (j.is_object() && j.contains("members")) {
    in.members = io::members_from_json(j);
    if (j.contains("split_dims") && j.at("split_dims").is_array() && j.at("split_dims").size() == 2) {
      in.split_dims = {j.at("split_dims")[0].get<Eigen::Index>(), j.at("split_dims")[1].get<Eigen::Index>()};
    }
  } else {
    in.members.push_back(io::matrix_from_json(j));
    in.single_matrix = true;
  }
  const Eigen::Index n = in.members.front().rows();
  for (const auto& m : in.members) {
    if (m.rows() != n || m.cols() != n) throw ParseError(c.input + ": members must be square of one size");
  }
  // Commands that need a commuting family reject the input up front.
  if (c.command == Command::certify || c.command == Command::fraas || c.command == Command::split) {
    MatrixFamily check(in.members, c.tolerances.commutation);
  }
  return in;
}

int run_generate(const ExperimentConfig& c, std::ostream& out) {
  GeneratorSpec spec;
  if (!c.spec_file.empty()) {
    spec = io::generator_spec_from_json(io::read_json_file(c.spec_file));
  } else {
    spec = trial_spec(c, 0);
  }
  const GeneratedFamily g = generate(spec);
  json j = io::family_to_json(g.members);
  j["spec"] = io::to_json(spec);
  if (g.split_dims) j["split_dims"] = {g.split_dims->first, g.split_dims->second};
  if (c.output.empty()) {
    out << j.dump(2) << '\n';
  } else {
    io::write_json_file(c.output, j);
  }
  return kExitOk;
}

double parse_double(const json& v, const char* key) {
  if (!v.is_number()) throw ParseError(std::string("config: \"") + key + "\" must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string("config: \"") + key + "\" must be finite");
  return x;
}

long parse_long(const json& v, const char* key) {
  if (!v.is_number_integer()) throw ParseError(std::string("config: \"") + key + "\" must be an integer");
  return v.get<long>();
}

IntRange range_from_json(const json& v, const char* key) {
  if (v.is_number_integer()) {
    const long x = v.get<long>();
    return parse_range(std::to_string(x));
  }
  if (v.is_string()) return parse_range(v.get<std::string>());
  if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
    return parse_range(std::to_string(v[0].get<long>()) + ":" + std::to_string(v[1].get<long>()));
  }
  throw ParseError(std::string("config: \"") + key + "\" must be an integer, \"lo:hi\" or [lo, hi]");
}

OutputFormat format_from_string(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ParseError("unknown format '" + std::string(s) + "' (expected csv or json)");
}

GeneratorKind generator_from_string(std::string_view s) {
  try {
    return generator_kind_from_string(s);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::certify: return "certify";
    case Command::fraas: return "fraas";
    case Command::split: return "split";
    case Command::spread: return "spread";
    case Command::counterexample: return "counterexample";
    case Command::generate: return "generate";
  }
  return "certify";
}

Command command_from_string(std::string_view name) {
  for (Command c : {Command::certify, Command::fraas, Command::split, Command::spread,
                    Command::counterexample, Command::generate}) {
    if (to_string(c) == name) return c;
  }
  throw ParseError("unknown command '" + std::string(name) + "'");
}

IntRange parse_range(std::string_view text) {
  const auto parse_one = [&](std::string_view s) {
    long v = 0;
    std::size_t used = 0;
    try {
      v = std::stol(std::string(s), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw ParseError("bad range '" + std::string(text) + "'");
    return v;
  };
  IntRange r;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    r.lo = r.hi = parse_one(text);
  } else {
    r.lo = parse_one(text.substr(0, colon));
    r.hi = parse_one(text.substr(colon + 1));
  }
  if (r.lo < 0 || r.hi < r.lo) throw ParseError("bad range '" + std::string(text) + "'");
  return r;
}

std::string to_string(const IntRange& r) {
  return r.lo == r.hi ? std::to_string(r.lo) : std::to_string(r.lo) + ":" + std::to_string(r.hi);
}

ExperimentConfig apply_config_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") {
        c.command = command_from_string(v.get<std::string>());
      } else if (key == "generator") {
        if (v.is_object()) {
          const GeneratorSpec spec = io::generator_spec_from_json(v);
          c.generator = spec.kind;
          c.n = {static_cast<long>(spec.n), static_cast<long>(spec.n)};
          c.k = {static_cast<long>(spec.k), static_cast<long>(spec.k)};
          c.n_qn = {static_cast<long>(spec.n_qn), static_cast<long>(spec.n_qn)};
          c.n_n = {static_cast<long>(spec.n_n), static_cast<long>(spec.n_n)};
          c.seed = spec.seed;
          c.scale = spec.scale;
        } else {
          c.generator = generator_from_string(v.get<std::string>());
        }
      } else if (key == "input") {
        c.input = v.get<std::string>();
      } else if (key == "spec") {
        c.spec_file = v.get<std::string>();
      } else if (key == "n") {
        c.n = range_from_json(v, "n");
      } else if (key == "k") {
        c.k = range_from_json(v, "k");
      } else if (key == "n_qn") {
        c.n_qn = range_from_json(v, "n_qn");
      } else if (key == "n_n") {
        c.n_n = range_from_json(v, "n_n");
      } else if (key == "scale") {
        c.scale = parse_double(v, "scale");
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "trials") {
        c.trials = parse_long(v, "trials");
      } else if (key == "output") {
        c.output = v.get<std::string>();
      } else if (key == "format") {
        c.format = format_from_string(v.get<std::string>());
      } else if (key == "suppress_timestamp") {
        c.suppress_timestamp = v.get<bool>();
      } else if (key == "threads") {
        c.threads = static_cast<unsigned>(parse_long(v, "threads"));
      } else if (key == "tolerances") {
        if (!v.is_object()) throw ParseError("config: \"tolerances\" must be an object");
        for (const auto& [tk, tv] : v.items()) {
          if (tk == "commutation") c.tolerances.commutation = parse_double(tv, "commutation");
          else if (tk == "schur") c.tolerances.schur = parse_double(tv, "schur");
          else if (tk == "spread_grid") c.tolerances.spread_grid = static_cast<int>(parse_long(tv, "spread_grid"));
          else if (tk == "spread_refinement")
            c.tolerances.spread_refinement = static_cast<int>(parse_long(tv, "spread_refinement"));
          else if (tk == "normality") c.tolerances.normality = parse_double(tv, "normality");
          else if (tk == "kernel") c.tolerances.kernel = parse_double(tv, "kernel");
          else throw ParseError("config: unknown tolerance \"" + tk + "\"");
        }
      } else {
        throw ParseError("config: unknown key \"" + key + "\"");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw ParseError("trials must be at least 1");
  if (c.scale <= 0.0 || !std::isfinite(c.scale)) throw ParseError("scale must be positive");
  if (c.tolerances.spread_grid < 16) throw ParseError("spread grid must be at least 16");
  if (c.tolerances.spread_refinement < 0) throw ParseError("spread refinement must be non-negative");
  for (double t : {c.tolerances.commutation, c.tolerances.schur, c.tolerances.normality, c.tolerances.kernel}) {
    if (!(t > 0.0)) throw ParseError("tolerances must be positive");
  }
  for (const IntRange* r : {&c.n, &c.k}) {
    if (r->lo < 1) throw ParseError("n and k must be at least 1");
  }
  if (c.command == Command::spread && c.input.empty() && !c.generator) {
    throw ParseError("spread needs --input or --gen");
  }
  if (!c.input.empty() && !std::filesystem::exists(c.input)) {
    throw ParseError("input file not found: " + c.input);
  }
  if (!c.spec_file.empty() && !std::filesystem::exists(c.spec_file)) {
    throw ParseError("spec file not found: " + c.spec_file);
  }
}

unsigned worker_count(const ExperimentConfig& c) {
  unsigned n = c.threads > 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NORMAL_APPROX_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  const long trials = std::max(1L, c.trials);
  return static_cast<unsigned>(std::min<long>(n, trials));
}

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  std::optional<TrialInput> fixed;
  try {
    validate(config);
    if (config.command == Command::generate) return run_generate(config, out);
    fixed = load_input(config);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }

  // A fixed input or the counterexample is a single instance.
  const long trials = fixed || config.command == Command::counterexample ? 1 : config.trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
  ExperimentConfig effective = config;
  effective.trials = trials;
  const unsigned workers = worker_count(effective);
  std::atomic<long> next{0};
  const auto work = [&] {
    for (long t = next++; t < trials; t = next++) {
      records[static_cast<std::size_t>(t)] = run_trial(config, t, fixed);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  const json summary = summarize(effective, records);
  try {
    std::ostringstream body;
    if (config.format == OutputFormat::csv) {
      body << kCsvHeader;
      const std::string extra = extra_header(config.command);
      if (!extra.empty()) body << ',' << extra;
      body << '\n';
      for (const auto& r : records) body << csv_row(r) << '\n';
    } else {
      json arr = json::array();
      for (const auto& r : records) arr.push_back(record_json(r));
      body << json{{"records", std::move(arr)}, {"summary", summary}}.dump(2) << '\n';
    }
    if (config.output.empty()) {
      out << body.str();
      if (config.format == OutputFormat::csv) err << summary.dump() << '\n';
    } else {
      std::ofstream f(config.output, std::ios::binary);
      if (!f) throw Error("cannot write " + config.output);
      f << body.str();
      if (config.format == OutputFormat::csv) io::write_json_file(config.output + ".summary.json", summary);
      out << summary.dump() << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }

  for (const auto& r : records) {
    if (r.status == TrialStatus::error) err << "trial " << r.trial << ": " << r.error << '\n';
  }
  if (summary["solver_failures"].get<long>() > 0) return kExitSolverFailure;
  if (summary["failures"].get<long>() > 0) return kExitCertificationFailure;
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Commuting normal approximations: batch experiments and reports", "normal-approx"};
  app.require_subcommand(1);

  struct Raw {
    std::string gen, input, spec, n, k, n_qn, n_n, out, format, config;
    double scale = 1.0;
    std::uint64_t seed = 0;
    long trials = 1;
    unsigned threads = 0;
    Tolerances tol;
  } raw;

  struct Opts {
    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> setters;
    CLI::Option* config = nullptr;
    CLI::Option* suppress = nullptr;
  };
  std::vector<std::pair<CLI::App*, Opts>> subs;

  const auto add_common = [&](CLI::App* sub) {
    Opts o;
    const auto add = [&](CLI::Option* opt, std::function<void(ExperimentConfig&)> set) {
      o.setters.emplace_back(opt, std::move(set));
    };
    add(sub->add_option("--gen", raw.gen, "generator kind"),
        [&](ExperimentConfig& c) { c.generator = generator_from_string(raw.gen); });
    add(sub->add_option("--input", raw.input, "family (or matrix) JSON file"),
        [&](ExperimentConfig& c) { c.input = raw.input; });
    add(sub->add_option("--n", raw.n, "dimension, N or LO:HI"),
        [&](ExperimentConfig& c) { c.n = parse_range(raw.n); });
    add(sub->add_option("--k", raw.k, "family size, K or LO:HI"),
        [&](ExperimentConfig& c) { c.k = parse_range(raw.k); });
    add(sub->add_option("--n-qn", raw.n_qn, "planted quasi-nilpotent dimension"),
        [&](ExperimentConfig& c) { c.n_qn = parse_range(raw.n_qn); });
    add(sub->add_option("--n-n", raw.n_n, "planted normal dimension"),
        [&](ExperimentConfig& c) { c.n_n = parse_range(raw.n_n); });
    add(sub->add_option("--scale", raw.scale, "multiplier applied to every member"),
        [&](ExperimentConfig& c) { c.scale = raw.scale; });
    add(sub->add_option("--seed", raw.seed, "base seed"), [&](ExperimentConfig& c) { c.seed = raw.seed; });
    add(sub->add_option("--trials", raw.trials, "number of seeded instances"),
        [&](ExperimentConfig& c) { c.trials = raw.trials; });
    add(sub->add_option("--out", raw.out, "report path (default stdout)"),
        [&](ExperimentConfig& c) { c.output = raw.out; });
    add(sub->add_option("--format", raw.format, "csv or json"),
        [&](ExperimentConfig& c) { c.format = format_from_string(raw.format); });
    add(sub->add_option("--threads", raw.threads, "worker count (default: available parallelism)"),
        [&](ExperimentConfig& c) { c.threads = raw.threads; });
    add(sub->add_option("--spec", raw.spec, "GeneratorSpec JSON file"),
        [&](ExperimentConfig& c) { c.spec_file = raw.spec; });
    add(sub->add_option("--grid", raw.tol.spread_grid, "spread grid points"),
        [&](ExperimentConfig& c) { c.tolerances.spread_grid = raw.tol.spread_grid; });
    add(sub->add_option("--refine", raw.tol.spread_refinement, "golden-section steps per local maximum"),
        [&](ExperimentConfig& c) { c.tolerances.spread_refinement = raw.tol.spread_refinement; });
    add(sub->add_option("--commutation-tol", raw.tol.commutation, "relative commutator tolerance"),
        [&](ExperimentConfig& c) { c.tolerances.commutation = raw.tol.commutation; });
    add(sub->add_option("--schur-tol", raw.tol.schur, "joint eigenvector residual tolerance"),
        [&](ExperimentConfig& c) { c.tolerances.schur = raw.tol.schur; });
    add(sub->add_option("--normality-tol", raw.tol.normality, "normality / split defect tolerance"),
        [&](ExperimentConfig& c) { c.tolerances.normality = raw.tol.normality; });
    add(sub->add_option("--kernel-tol", raw.tol.kernel, "numerical-rank cut for kernels"),
        [&](ExperimentConfig& c) { c.tolerances.kernel = raw.tol.kernel; });
    o.config = sub->add_option("--config", raw.config, "JSON config; flags override it");
    o.suppress = sub->add_flag("--suppress-timestamp", "omit the timestamp and zero wall_ms");
    subs.emplace_back(sub, std::move(o));
  };

  add_common(app.add_subcommand("certify", "certify the distance bound on each family"));
  add_common(app.add_subcommand("fraas", "check normality of families with a scalar gram sum"));
  add_common(app.add_subcommand("split", "split into joint quasi-nilpotent and normal parts"));
  add_common(app.add_subcommand("spread", "numerical spread of a matrix (or a family's gram sum)"));
  add_common(app.add_subcommand("counterexample", "the non-commuting Cholesky pair"));
  add_common(app.add_subcommand("generate", "write a generated family"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParseError;
  }

  try {
    for (auto& [sub, o] : subs) {
      if (!sub->parsed()) continue;
      ExperimentConfig c;
      if (o.config->count() > 0) c = apply_config_json(io::read_json_file(raw.config), c);
      c.command = command_from_string(sub->get_name());
      for (auto& [opt, set] : o.setters) {
        if (opt->count() > 0) set(c);
      }
      if (o.suppress->count() > 0) c.suppress_timestamp = true;
      return run(c, out, err);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  }
  return kExitParseError;
}

}  // namespace normal_approx::cli
