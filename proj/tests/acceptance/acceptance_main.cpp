// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "normal_approx/approx.hpp"
#include "normal_approx/cli.hpp"
#include "normal_approx/compact_split.hpp"
#include "normal_approx/gen.hpp"
#include "normal_approx/io.hpp"
#include "normal_approx/spectra.hpp"

using namespace normal_approx;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct CliRun {
  int status = -1;
  std::string out, err;
  double seconds = 0.0;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "normal-approx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  CliRun r;
  r.status = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const fs::path kWork = fs::temp_directory_path() / "normal_approx_acceptance";

// Command lines reused by the determinism criterion.
std::vector<std::string> c1_args(const fs::path& out) {
  return {"certify", "--gen", "poly_in_one", "--n", "2:12", "--k", "1:5", "--trials", "1000",
          "--seed", "7", "--out", out.string(), "--suppress-timestamp"};
}
std::vector<std::string> c2_args(const fs::path& out) {
  return {"fraas", "--gen", "planted_normal_scalar_sum", "--n", "1:16", "--k", "1:6", "--trials", "200",
          "--seed", "11", "--out", out.string(), "--suppress-timestamp"};
}
std::vector<std::string> c5_args(long n, const fs::path& out) {
  return {"certify", "--gen", "truncated_shift", "--n", std::to_string(n), "--k", "1", "--out", out.string(),
          "--suppress-timestamp"};
}
std::vector<std::string> c6_args(const fs::path& out) {
  return {"split", "--gen", "nilpotent_plus_normal", "--n-qn", "1:8", "--n-n", "1:8", "--k", "1:4",
          "--trials", "100", "--seed", "13", "--out", out.string(), "--suppress-timestamp"};
}

Outcome criterion1() {
  const fs::path out = kWork / "c1.csv";
  const CliRun r = cli_run(c1_args(out));
  Outcome o;
  if (r.status != 0) {
    o.pass = false;
    o.detail = "exit " + std::to_string(r.status) + " " + r.err;
  }
  const auto rows = read_csv(out);
  if (rows.size() != 1001) return {false, "expected 1000 rows, got " + std::to_string(rows.size() - 1)};
  const auto& h = rows[0];
  const std::size_t lhs = column(h, "lhs"), rhs = column(h, "rhs"), res = column(h, "schur_residual"),
                    verdict = column(h, "verdict"), n = column(h, "n"), k = column(h, "k");
  long violations = 0, not_certified = 0, outside_range = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double l = std::stod(rows[i][lhs]), rr = std::stod(rows[i][rhs]);
    if (std::stod(rows[i][res]) > 1e-8 || l > rr * (1.0 + 1e-8) + 1e-10) ++violations;
    if (rows[i][verdict] != "true") ++not_certified;
    const long ni = std::stol(rows[i][n]), ki = std::stol(rows[i][k]);
    if (ni < 2 || ni > 12 || ki < 1 || ki > 5) ++outside_range;
    if (rr > 0) worst = std::max(worst, l / rr);
  }
  if (violations || not_certified || outside_range || r.seconds >= 120.0) o.pass = false;
  o.detail += "1000 families, violations=" + std::to_string(violations) +
              " certification failures=" + std::to_string(not_certified) + " max ratio=" + fmt(worst) +
              " runtime=" + fmt(r.seconds) + "s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const CliRun r = cli_run(c2_args(kWork / "c2.csv"));
  if (r.status != 0) {
    o.pass = false;
    o.detail = "fraas exit " + std::to_string(r.status) + "; ";
  }
  long bad_verdict = 0, bad_distance = 0;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    SplitMix64 rng(derive_seed(2024, t));
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(16));
    const auto k = 1 + static_cast<std::size_t>(rng.below(6));
    const MatrixFamily f = gen_planted_normal_scalar_sum(n, k, rng.next()).family();
    if (!fraas_check(f, 1e-8).verdict) ++bad_verdict;
    const NormalApproximation na = normal_approximation(f);
    double dist = 0.0;
    for (std::size_t i = 0; i < k; ++i) dist += (f[i] - na.normals[i]).squaredNorm();
    const double m = f.max_member_norm();
    const double bound = 1e-12 * static_cast<double>(n) * static_cast<double>(k) * m * m;
    if (dist > bound) ++bad_distance;
    worst = std::max(worst, dist / bound);
  }
  if (bad_verdict || bad_distance) o.pass = false;
  o.detail += "200 families, false verdicts=" + std::to_string(bad_verdict) +
              " distance violations=" + std::to_string(bad_distance) + " worst distance/bound=" + fmt(worst);
  return o;
}

Outcome criterion3() {
  const auto [a1, a2] = cholesky_counterexample();
  const double gram = (a1.adjoint() * a1 + a2.adjoint() * a2 - ComplexMatrix::Identity(2, 2)).norm();
  const double d1 = normality_defect(a1), d2 = normality_defect(a2), c = commutator_defect(a1, a2);
  bool rejected = false;
  try {
    MatrixFamily f({a1, a2});
  } catch (const NonCommutingFamily&) {
    rejected = true;
  }
  const CliRun r = cli_run({"counterexample", "--suppress-timestamp"});
  Outcome o;
  o.pass = gram <= 1e-15 && std::abs(d1 - 1.0) <= 1e-12 && std::abs(d2 - 1.0) <= 1e-12 &&
           std::abs(c - 1.0) <= 1e-12 && rejected && r.status == 0;
  o.detail = "gram error=" + fmt(gram) + " defects=" + fmt(d1) + "," + fmt(d2) + " commutator=" + fmt(c) +
             (rejected ? " rejected" : " NOT rejected") + " exit=" + std::to_string(r.status);
  return o;
}

// Largest pairwise distance among Rayleigh quotients of random unit vectors,
// computed as the diameter of their convex hull.
double rayleigh_oracle(const ComplexMatrix& a, int samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Eigen::Index n = a.rows();
  std::vector<std::pair<double, double>> pts;
  pts.reserve(samples);
  const int block = 2000;
  for (int done = 0; done < samples; done += block) {
    const int b = std::min(block, samples - done);
    ComplexMatrix v(n, b);
    for (int j = 0; j < b; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) v(i, j) = rng.complex_gaussian();
    }
    v.colwise().normalize();
    const ComplexMatrix av = a * v;
    for (int j = 0; j < b; ++j) {
      const Complex q = v.col(j).dot(av.col(j));
      pts.emplace_back(q.real(), q.imag());
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto cross = [](auto o, auto p, auto q) {
    return (p.first - o.first) * (q.second - o.second) - (p.second - o.second) * (q.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      best = std::max(best, std::hypot(hull[i].first - hull[j].first, hull[i].second - hull[j].second));
    }
  }
  return best;
}

Outcome criterion4() {
  long normal_fail = 0, sample_fail = 0;
  double worst_normal = 0.0, worst_excess = -1e300;
  for (std::uint64_t t = 0; t < 100; ++t) {
    SplitMix64 rng(derive_seed(404, t));
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(32));
    ComplexVector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = 2.0 * rng.complex_gaussian();
    const ComplexMatrix u = random_unitary(n, rng);
    const ComplexMatrix a = u * d.asDiagonal() * u.adjoint();
    const double gap = std::abs(numerical_spread(a).spread - spectral_diameter(a));
    const double tol = 1e-6 * (1.0 + a.norm());
    if (gap > tol) ++normal_fail;
    worst_normal = std::max(worst_normal, gap / tol);
  }
  for (std::uint64_t t = 0; t < 100; ++t) {
    SplitMix64 rng(derive_seed(405, t));
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(32));
    const ComplexMatrix a = random_gaussian_matrix(n, n, rng);
    const double s = numerical_spread(a).spread;
    const double oracle = rayleigh_oracle(a, 100000, rng.next());
    const double scale = 1.0 + a.norm();
    if (oracle > s + 1e-9 * scale) ++sample_fail;
    worst_excess = std::max(worst_excess, (oracle - s) / scale);
  }
  Outcome o;
  o.pass = normal_fail == 0 && sample_fail == 0;
  o.detail = "normal mismatches=" + std::to_string(normal_fail) + " (worst gap/tol " + fmt(worst_normal) +
             "), oracle excesses=" + std::to_string(sample_fail) + " (max (oracle-spread)/scale " +
             fmt(worst_excess) + ")";
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (long n : {2L, 10L, 50L}) {
    const fs::path out = kWork / ("c5_" + std::to_string(n) + ".csv");
    const CliRun r = cli_run(c5_args(n, out));
    const auto rows = read_csv(out);
    if (r.status != 0 || rows.size() != 2) {
      o.pass = false;
      o.detail += " n=" + std::to_string(n) + " exit " + std::to_string(r.status);
      continue;
    }
    const double lhs = std::stod(rows[1][column(rows[0], "lhs")]);
    const double rhs = std::stod(rows[1][column(rows[0], "rhs")]);
    const double nd = static_cast<double>(n);
    const bool ok = std::abs(lhs - (nd - 1.0)) <= 1e-10 && std::abs(rhs - nd) <= 1e-6;
    o.pass = o.pass && ok;
    o.detail += " n=" + std::to_string(n) + ": lhs=" + io::format_double(lhs) + " rhs=" + io::format_double(rhs);
  }
  o.detail += " exit 0 each";
  return o;
}

Outcome criterion6() {
  Outcome o;
  const CliRun r = cli_run(c6_args(kWork / "c6.csv"));
  if (r.status != 0) {
    o.pass = false;
    o.detail = "split exit " + std::to_string(r.status) + "; ";
  }
  long dim_fail = 0, defect_fail = 0, radius_fail = 0;
  double worst_defect = 0.0, worst_radius = 0.0;
  const double scales[] = {1.0, 0.01, 100.0};
  for (std::uint64_t t = 0; t < 100; ++t) {
    SplitMix64 rng(derive_seed(606, t));
    const auto nq = static_cast<Eigen::Index>(rng.below(9));
    const auto nn = static_cast<Eigen::Index>(nq == 0 ? 1 + rng.below(8) : rng.below(9));
    GeneratorSpec spec;
    spec.kind = GeneratorKind::nilpotent_plus_normal;
    spec.n_qn = nq;
    spec.n_n = nn;
    spec.n = nq + nn;
    spec.k = 1 + static_cast<std::size_t>(rng.below(4));
    spec.seed = rng.next();
    spec.scale = scales[t % 3];
    const MatrixFamily f = generate(spec).family();
    const SplitResult s = split(f);
    const double scale = f.max_member_norm();
    if (s.qn_dim() != nq || s.n_dim() != nn) ++dim_fail;
    double defect = s.invariance_defect;
    for (double x : s.normality_defects_on_hn) defect = std::max(defect, x);
    double radius = 0.0;
    for (double x : s.qn_spectral_radii) radius = std::max(radius, x);
    if (defect > 1e-8 * scale) ++defect_fail;
    if (radius > 1e-6 * scale) ++radius_fail;
    worst_defect = std::max(worst_defect, defect / scale);
    worst_radius = std::max(worst_radius, radius / scale);
  }
  o.pass = o.pass && dim_fail == 0 && defect_fail == 0 && radius_fail == 0;
  o.detail += "100 families, dimension misses=" + std::to_string(dim_fail) +
              " defect violations=" + std::to_string(defect_fail) + " (worst " + fmt(worst_defect) +
              "·scale) radius violations=" + std::to_string(radius_fail) + " (worst " + fmt(worst_radius) +
              "·scale)";
  return o;
}

Outcome criterion7() {
  struct Case {
    std::string name;
    std::function<std::vector<std::string>(const fs::path&)> args;
  };
  const std::vector<Case> cases{
      {"c1", c1_args},
      {"c2", c2_args},
      {"c3", [](const fs::path& p) {
         return std::vector<std::string>{"counterexample", "--out", p.string(), "--suppress-timestamp"};
       }},
      {"c5", [](const fs::path& p) { return c5_args(50, p); }},
      {"c6", c6_args},
  };
  Outcome o;
  for (const auto& c : cases) {
    const fs::path a = kWork / (c.name + "_det_a.csv"), b = kWork / (c.name + "_det_b.csv");
    auto args_a = c.args(a), args_b = c.args(b);
    args_b.insert(args_b.end(), {"--threads", "3"});
    cli_run(args_a);
    cli_run(args_b);
    const std::string sa = slurp(a), sb = slurp(b);
    const bool same = !sa.empty() && sa == sb &&
                      slurp(a.string() + ".summary.json") == slurp(b.string() + ".summary.json");
    o.pass = o.pass && same;
    o.detail += " " + c.name + (same ? "=identical" : "=DIFFERENT");
  }
  return o;
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 bound over 1000 poly_in_one families", criterion1},
      {"2 planted scalar gram-sum families are normal", criterion2},
      {"3 Cholesky counterexample", criterion3},
      {"4 numerical spread correctness", criterion4},
      {"5 truncated shift lhs/rhs", criterion5},
      {"6 quasi-nilpotent/normal split recovery", criterion6},
      {"7 byte-identical reruns", criterion7},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
  }
  fs::remove_all(kWork);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
