// Copyright 2026 The rwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rwalk: command-line front end. Every command is a pure function of its
// configuration and the law cache; timings go to stderr only.

#include <rwalk/rwalk.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kFormatVersion = 1;
constexpr std::uint64_t kDefaultSeed = 2718281828ULL;
constexpr const char* kCacheEnv = "RWALK_CACHE_DIR";

enum Exit : int { kPass = 0, kUsage = 1, kNumerical = 2, kContradiction = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = kDefaultSeed;
  std::int64_t samples = 0;
  std::int64_t horizon = 0;
  std::int64_t n_max = 0;
  std::int64_t l_max = 2000;
  std::int64_t k_max = 4000000;
  std::string out;
  std::string cache_dir;
  std::string format = "csv";
  std::vector<std::int64_t> schedule;
  // chain only
  std::string chain_file;
  std::int64_t z = 0;
  std::int64_t y = 0;

  json to_json() const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["samples"] = samples;
    j["horizon"] = horizon;
    j["n_max"] = n_max;
    j["l_max"] = l_max;
    j["k_max"] = k_max;
    j["format"] = format;
    j["schedule"] = schedule;
    if (command == "chain") {
      j["chain_file"] = chain_file;
      j["z"] = z;
      j["y"] = y;
    }
    return j;
  }
};

std::string fmt(long double x) { return rwalk::format_prob(x); }

// ---------------------------------------------------------------------------
// Output.
// ---------------------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json summary = json::object();
};

std::string render(const RunConfig& c, const Table& t) {
  std::ostringstream os;
  if (c.format == "json") {
    json j;
    j["format_version"] = kFormatVersion;
    j["config"] = c.to_json();
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    j["summary"] = t.summary;
    os << j.dump(2) << "\n";
    return os.str();
  }
  os << "# rwalk-format " << kFormatVersion << "\n";
  os << "# config " << c.to_json().dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  os << "# summary " << t.summary.dump() << "\n";
  return os.str();
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open output file " + c.out);
  f << text;
  if (!f) throw UsageError("failed writing " + c.out);
}

void log(const std::string& msg) { std::cerr << "[rwalk] " << msg << "\n"; }

// ---------------------------------------------------------------------------
// Validation and the nu cache.
// ---------------------------------------------------------------------------

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

void require_even(std::int64_t v, std::int64_t lo, const std::string& flag) {
  require(v >= lo && v % 2 == 0, flag + " must be an even integer >= " + std::to_string(lo));
}

void require_schedule(const RunConfig& c, std::int64_t lo, std::int64_t hi) {
  require(!c.schedule.empty(), "--schedule must not be empty");
  for (auto v : c.schedule)
    require(v >= lo && v <= hi,
            "--schedule entries must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

std::string cache_dir(const RunConfig& c) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  if (const char* env = std::getenv(kCacheEnv); env != nullptr) return env;
  return {};
}

/// Loads nu from the cache or computes and stores it. The returned law is
/// always the parsed serialization, so cache hits and misses agree bitwise.
rwalk::NuLaw load_nu(const RunConfig& c) {
  require_even(c.l_max, 2, "--l-max");
  require_even(c.k_max, 2, "--k-max");
  const std::string dir = cache_dir(c);
  fs::path path;
  if (!dir.empty()) {
    path = fs::path(dir) / ("nu_l" + std::to_string(c.l_max) + "_k" + std::to_string(c.k_max) + ".csv");
    if (fs::exists(path)) {
      std::ifstream in(path);
      try {
        auto nu = rwalk::read_nu_csv(in, c.l_max, c.k_max);
        log("nu cache hit: " + path.string());
        return nu;
      } catch (const std::exception& e) {
        throw NumericalError(std::string(e.what()) + " in " + path.string() +
                             "; delete the file and rerun to rebuild it");
      }
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto nu = rwalk::nu_law(c.l_max, c.k_max);
  std::ostringstream os;
  rwalk::write_nu_csv(os, nu);
  log("nu computed in " +
      std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s");
  if (!dir.empty()) {
    fs::create_directories(dir);
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << os.str();
    }
    fs::rename(tmp, path);
    log("nu cache written: " + path.string());
  }
  std::istringstream in(os.str());
  return rwalk::read_nu_csv(in, c.l_max, c.k_max);
}

std::int64_t even_at_least(std::int64_t v) { return v + (v % 2 != 0); }

/// Richardson estimate of lim m F~(m) from m = l_max / 10 and 2m.
std::pair<long double, std::int64_t> sigma_hat(const rwalk::NuLaw& nu) {
  const std::int64_t m = even_at_least(std::max<std::int64_t>(2, nu.l_max / 10));
  return {rwalk::richardson_limit(rwalk::tail_functional(nu, m).value(),
                                  rwalk::tail_functional(nu, 2 * m).value()),
          m};
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

int cmd_return_law(const RunConfig& c) {
  require_even(c.n_max, 2, "--n-max");
  const auto law = rwalk::first_return_law(c.n_max);
  Table t;
  t.columns = {"n", "probability", "n_three_halves_p", "exact"};
  for (std::int64_t n = 2; n <= c.n_max; n += 2) {
    const long double p = law.prob(n);
    const auto ex = law.exact(n);
    t.rows.push_back({std::to_string(n), fmt(p), fmt(p * std::pow(static_cast<long double>(n), 1.5L)),
                      ex ? rwalk::to_string(*ex) : ""});
  }
  t.summary["tail_mass"] = fmt(law.tail_mass());
  const std::int64_t lo = c.n_max >= 118 ? 100 : 2;
  const std::int64_t hi = std::min<std::int64_t>(c.n_max, 1000);
  int code = kPass;
  try {
    const auto fit = rwalk::kesten_fit(law, lo, hi);
    const bool ok = fit.slope >= -1.55 && fit.slope <= -1.45;
    t.summary["kesten_fit"] = {{"lo", lo}, {"hi", hi}, {"points", fit.points}, {"slope", fit.slope},
                               {"tau_hat", fit.tau_hat}, {"slope_check", ok ? "pass" : "fail"}};
    if (!ok) code = kNumerical;
  } catch (const std::invalid_argument& e) {
    t.summary["kesten_fit"] = {{"lo", lo}, {"hi", hi}, {"error", e.what()}};
    code = kNumerical;
  }
  emit(c, render(c, t));
  return code;
}

int cmd_tail(const RunConfig& c) {
  require_schedule(c, 1, c.l_max);
  const auto nu = load_nu(c);
  Table t;
  t.columns = {"m", "m_tail", "window", "beyond_lmax", "completion", "error_bound"};
  std::map<std::int64_t, long double> values;
  for (auto m : c.schedule) {
    const auto tf = rwalk::tail_functional(nu, m);
    values[m] = tf.value();
    t.rows.push_back({std::to_string(m), fmt(tf.value()), fmt(tf.window), fmt(tf.beyond_lmax),
                      fmt(tf.completion), fmt(tf.error_bound)});
  }
  json rich = json::array();
  for (const auto& [m, v] : values)
    if (auto it = values.find(2 * m); it != values.end())
      rich.push_back({{"m", m}, {"limit", fmt(rwalk::richardson_limit(v, it->second))}});
  t.summary["richardson"] = rich;
  t.summary["nu_window_mass"] = fmt(nu.window_mass());
  t.summary["nu_tail_mass"] = fmt(nu.tail_mass());
  emit(c, render(c, t));
  return kPass;
}

int cmd_lll(const RunConfig& c) {
  require_schedule(c, 1, 1 << 12);
  const auto nu = load_nu(c);
  const auto [sigma, m] = sigma_hat(nu);
  const auto target = rwalk::StableTarget::cauchy_from_tail_constant(static_cast<double>(sigma));
  const auto powers = rwalk::convolution_powers(rwalk::to_lattice(nu), c.schedule);
  const double leak = static_cast<double>(nu.tail_mass());
  const double point_bound = rwalk::dropped_point_bound(nu);
  std::vector<rwalk::LllError> errs;
  for (const auto& [n, d] : powers) errs.push_back(rwalk::lll_error(d, target, n, leak, point_bound));

  Table t;
  t.columns = {"n", "sup_error", "argmax_k", "n_times_p0", "truncation_effect", "mass_plus_leaked"};
  bool decreasing = true;
  json warnings = json::array();
  for (std::size_t i = 0; i < errs.size(); ++i) {
    const auto& e = errs[i];
    const auto& d = powers.at(e.n);
    t.rows.push_back({std::to_string(e.n), fmt(e.sup_error), std::to_string(e.argmax), fmt(e.n_times_p0),
                      fmt(e.truncation_effect), fmt(d.total() + d.leaked)});
    if (i > 0 && !(e.sup_error < errs[i - 1].sup_error)) decreasing = false;
    if (e.truncation_warning) warnings.push_back(e.n);
  }
  const auto lb = rwalk::lower_bound_check(powers, 0.5, 16);
  const double last = errs.back().n_times_p0;
  const bool window = last >= 0.55 && last <= 0.72;
  t.summary["sigma_hat"] = fmt(sigma);
  t.summary["sigma_from_m"] = {m, 2 * m};
  t.summary["cauchy_gamma"] = fmt(std::numbers::pi_v<long double> * sigma);
  t.summary["sup_error_strictly_decreasing"] = decreasing;
  t.summary["truncation_warnings"] = warnings;
  t.summary["lower_bound"] = {{"a", lb.a_const}, {"n0", lb.n0}, {"min", lb.min_value}, {"pass", lb.pass}};
  t.summary["n_times_p0_in_window"] = window;
  emit(c, render(c, t));
  for (auto n : warnings) log("warning: truncation may move the sup error by >10% at n = " + std::to_string(n.get<std::int64_t>()));
  return decreasing && lb.pass && window ? kPass : kNumerical;
}

int cmd_classify(const RunConfig& c) {
  require(c.samples >= 1 && c.horizon >= 1, "--samples and --horizon must be >= 1");
  const rwalk::NamedPoints np;
  const std::vector<std::pair<std::string, rwalk::ZState>> points = {
      {"pi", np.pi()}, {"R", np.r()}, {"O1", np.o1()}, {"O2", np.o2()}, {"P", np.p()}, {"Q", np.q()}};
  std::vector<rwalk::ClassificationReport> reports;
  for (const auto& [label, s] : points)
    reports.push_back(rwalk::classify_point(s, c.horizon, static_cast<std::uint64_t>(c.samples), c.seed, label));

  std::set<std::string> kinds;
  bool contradiction = false;
  for (const auto& r : reports) {
    kinds.insert(rwalk::name(r.verdict));
    contradiction = contradiction || r.contradiction;
    if (r.wide_ci) log("wide confidence interval for " + r.label + "; the exact oracle decides the verdict");
  }
  std::ostringstream os;
  if (c.format == "json") {
    json j;
    j["format_version"] = kFormatVersion;
    j["config"] = c.to_json();
    json arr = json::array();
    for (const auto& r : reports) {
      json z = std::isfinite(r.z_score) ? json(r.z_score) : json(nullptr);
      arr.push_back({{"point", r.label},
                     {"state", rwalk::to_string(r.point)},
                     {"verdict", rwalk::name(r.verdict)},
                     {"p_recurrent", rwalk::to_string(r.p_recurrent)},
                     {"p_escape", rwalk::to_string(r.p_escape)},
                     {"mc",
                      {{"estimate", r.mc.estimate},
                       {"ci_lo", r.mc.ci_lo},
                       {"ci_hi", r.mc.ci_hi},
                       {"horizon", r.horizon},
                       {"nsamples", r.nsamples},
                       {"seed", r.seed}}},
                     {"z_score", z},
                     {"wide_ci", r.wide_ci},
                     {"contradiction", r.contradiction},
                     {"note", r.note}});
    }
    j["reports"] = arr;
    j["verdicts_present"] = kinds;
    os << j.dump(2) << "\n";
    emit(c, os.str());
  } else {
    Table t;
    t.columns = {"point", "state", "verdict", "p_recurrent", "p_escape", "mc_estimate", "ci_lo", "ci_hi",
                 "wide_ci", "contradiction"};
    for (const auto& r : reports)
      t.rows.push_back({r.label, rwalk::to_string(r.point), rwalk::name(r.verdict),
                        rwalk::to_string(r.p_recurrent), rwalk::to_string(r.p_escape), fmt(r.mc.estimate),
                        fmt(r.mc.ci_lo), fmt(r.mc.ci_hi), r.wide_ci ? "1" : "0", r.contradiction ? "1" : "0"});
    t.summary["verdicts_present"] = kinds;
    emit(c, render(c, t));
  }
  if (contradiction) return kContradiction;
  return kinds.size() == 3 ? kPass : kNumerical;
}

int cmd_green(const RunConfig& c) {
  require(c.n_max >= 1 && c.samples >= 1 && c.horizon >= 0, "--n-max, --samples must be >= 1");
  require_schedule(c, 1, c.n_max);
  std::vector<std::int64_t> grid = c.schedule;
  for (std::int64_t dec = 1; dec <= c.n_max; dec *= 10)
    for (std::int64_t f : {1, 2, 5})
      if (f * dec <= c.n_max) grid.push_back(f * dec);
  grid.push_back(c.n_max);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<std::int64_t> sched = c.schedule;
  std::sort(sched.begin(), sched.end());
  sched.erase(std::unique(sched.begin(), sched.end()), sched.end());

  const auto ns = static_cast<std::uint64_t>(c.samples);
  const auto aux = rwalk::shifted_green_sum(c.n_max, ns, c.seed, rwalk::GreenMethod::Auxiliary, grid, c.horizon);
  const auto dir = rwalk::shifted_green_sum(c.n_max, ns, c.seed, rwalk::GreenMethod::Direct, grid, c.horizon);

  Table t;
  t.columns = {"n", "auxiliary", "auxiliary_se", "direct", "direct_se", "difference", "joint_se",
               "growth_ratio_auxiliary", "growth_ratio_direct"};
  bool growth_ok = true;
  for (auto n : grid) {
    std::string ga, gd;
    auto it = std::find(sched.begin(), sched.end(), n);
    if (it != sched.end() && it != sched.begin()) {
      const double ra = aux.at(n) / aux.at(*(it - 1));
      ga = fmt(ra);
      gd = fmt(dir.at(n) / dir.at(*(it - 1)));
      growth_ok = growth_ok && ra >= 1.3 && ra <= 2.7;
    }
    const double joint = std::hypot(aux.se(n), dir.se(n));
    t.rows.push_back({std::to_string(n), fmt(aux.at(n)), fmt(aux.se(n)), fmt(dir.at(n)), fmt(dir.se(n)),
                      fmt(aux.at(n) - dir.at(n)), fmt(joint), ga, gd});
  }
  bool nondecreasing = true;
  for (std::size_t n = 1; n < aux.partial.size(); ++n)
    nondecreasing = nondecreasing && aux.partial[n] >= aux.partial[n - 1] && dir.partial[n] >= dir.partial[n - 1];
  json disc = json::array();
  for (auto n : sched) {
    const double joint = std::hypot(aux.se(n), dir.se(n));
    const double z = joint > 0 ? (aux.at(n) - dir.at(n)) / joint : 0.0;
    disc.push_back({{"n", n}, {"difference", aux.at(n) - dir.at(n)}, {"z", z}, {"within_3_sigma", std::abs(z) <= 3}});
  }
  t.summary["nondecreasing"] = nondecreasing;
  t.summary["auxiliary_growth_ratio_in_window"] = growth_ok;
  t.summary["cross_method"] = disc;
  t.summary["exhausted"] = {{"auxiliary", aux.exhausted}, {"direct", dir.exhausted}};
  emit(c, render(c, t));

  for (const auto* g : {&aux, &dir})
    if (static_cast<double>(g->exhausted) > 0.01 * static_cast<double>(ns))
      log(std::string("warning: ") + rwalk::name(g->method) + ": " + std::to_string(g->exhausted) +
          " trajectories did not complete " + std::to_string(c.n_max) + " returns within the horizon");
  for (const auto& d : disc)
    if (!d["within_3_sigma"].get<bool>())
      log("cross-method discrepancy at n = " + std::to_string(d["n"].get<std::int64_t>()) +
          ": z = " + std::to_string(d["z"].get<double>()));
  return nondecreasing && growth_ok ? kPass : kNumerical;
}

int cmd_ldp(const RunConfig& c) {
  require(c.samples >= 1, "--samples must be >= 1");
  require_schedule(c, 1, 1 << 16);
  const auto fit = rwalk::ldp_check(c.schedule, static_cast<std::uint64_t>(c.samples), c.seed);
  Table t;
  t.columns = {"n", "estimate", "ci_lo", "ci_hi", "exact", "exact_decimal", "bound"};
  for (const auto& [n, e] : fit.estimates) {
    const auto& ex = fit.exact.at(n);
    t.rows.push_back({std::to_string(n), fmt(e.estimate), fmt(e.ci_lo), fmt(e.ci_hi), rwalk::to_string(ex),
                      fmt(rwalk::to_real(ex)), fmt(std::exp(-fit.c_hat * static_cast<double>(n)))});
  }
  t.summary["c_hat"] = fit.c_hat;
  t.summary["intercept"] = fit.intercept;
  t.summary["c_bound"] = fit.c_bound;
  t.summary["monotone"] = fit.monotone;
  t.summary["agrees_with_exact"] = fit.agrees_with_exact;
  t.summary["resolution_warning"] = fit.resolution_warning;
  t.summary["pass"] = fit.pass;
  emit(c, render(c, t));
  if (fit.resolution_warning) log("warning: fewer than 10 exceedances at some n; increase --samples");
  if (!fit.agrees_with_exact) return kContradiction;
  return fit.pass ? kPass : kNumerical;
}

int cmd_chain(const RunConfig& c) {
  std::ifstream in(c.chain_file);
  require(static_cast<bool>(in), "cannot open " + c.chain_file);
  rwalk::FiniteChain chain = [&] {
    try {
      return rwalk::parse_chain_csv(in);
    } catch (const std::exception& e) {
      throw UsageError(std::string("bad chain file: ") + e.what());
    }
  }();
  require(c.z >= 0 && c.y >= 0 && static_cast<std::size_t>(c.z) < chain.size() &&
              static_cast<std::size_t>(c.y) < chain.size(),
          "--z and --y must be states of the chain");
  const auto rep = rwalk::verify_equivalences(chain, static_cast<std::size_t>(c.z), static_cast<std::size_t>(c.y));
  auto strs = [](const std::vector<rwalk::Rational>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(rwalk::to_string(x));
    return out;
  };
  json j;
  j["format_version"] = kFormatVersion;
  j["config"] = c.to_json();
  j["hit_from_z"] = rwalk::to_string(rep.hit_from_z);
  j["first_return_from_z"] = rwalk::to_string(rep.first_return_from_z);
  j["return_to_y"] = rwalk::to_string(rep.return_to_y);
  j["recurrent_y"] = rep.recurrent_y();
  j["visits_tail_product"] = strs(rep.visits_tail_product);
  j["visits_tail_direct"] = strs(rep.visits_tail_direct);
  j["expected_visits"] = rep.expected_visits ? json(rwalk::to_string(*rep.expected_visits)) : json("inf");
  j["tails_agree"] = rep.tails_agree();
  j["green_consistent"] = rep.green_consistent;
  j["green_note"] = rep.green_note;
  emit(c, j.dump(2) + "\n");
  return rep.ok() ? kPass : kNumerical;
}

void add_common(CLI::App* sub, RunConfig& c, bool samples, bool horizon, bool n_max, bool laws, bool schedule) {
  sub->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  if (samples) sub->add_option("--samples", c.samples, "Monte Carlo sample count")->capture_default_str();
  if (horizon) sub->add_option("--horizon", c.horizon, "step horizon")->capture_default_str();
  if (n_max) sub->add_option("--n-max", c.n_max, "largest n")->capture_default_str();
  if (laws) {
    sub->add_option("--l-max", c.l_max, "nu table half-width (even)")->capture_default_str();
    sub->add_option("--k-max", c.k_max, "largest return time in nu (even)")->capture_default_str();
    sub->add_option("--cache-dir", c.cache_dir, std::string("law cache directory (default $") + kCacheEnv + ")");
  }
  if (schedule) sub->add_option("--schedule", c.schedule, "comma-separated n values")->delimiter(',')->capture_default_str();
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks on a homogeneous space of the free group: experiments and oracles"};
  app.require_subcommand(1);

  RunConfig ret{"return-law"};
  ret.n_max = 1000;
  add_common(app.add_subcommand("return-law", "first-return law and its n^{-3/2} fit"), ret, false, false, true,
             false, false);

  RunConfig tail{"tail"};
  tail.schedule = {25, 50, 100, 200, 400, 800};
  add_common(app.add_subcommand("tail", "m P(Z >= m) for the law nu"), tail, false, false, false, true, true);

  RunConfig lll{"lll"};
  lll.schedule = {8, 16, 32, 64};
  add_common(app.add_subcommand("lll", "local limit error of nu-convolutions"), lll, false, false, false, true,
             true);

  RunConfig cls{"classify"};
  cls.samples = 100000;
  cls.horizon = 10000;
  cls.format = "json";
  add_common(app.add_subcommand("classify", "classify the six named points"), cls, true, true, false, false,
             false);

  RunConfig green{"green"};
  green.samples = 100000;
  green.n_max = 10000;
  green.schedule = {100, 1000, 10000};
  add_common(app.add_subcommand("green", "Green partial sums at pi, both methods"), green, true, true, true,
             false, true);

  RunConfig ldp{"ldp"};
  ldp.samples = 1000000;
  ldp.schedule = {5, 10, 20};
  add_common(app.add_subcommand("ldp", "large deviations of H_n"), ldp, true, false, false, false, true);

  RunConfig chain{"chain"};
  chain.format = "json";
  auto* ch = app.add_subcommand("chain", "check the recurrence equivalences on a finite chain (CSV)");
  ch->add_option("file", chain.chain_file, "chain CSV: the state count, then one row of rationals per state")->required();
  ch->add_option("--z", chain.z, "start state")->capture_default_str();
  ch->add_option("--y", chain.y, "target state")->capture_default_str();
  ch->add_option("--out", chain.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = kPass;
  std::string which;
  try {
    for (auto* sub : app.get_subcommands()) which = sub->get_name();
    if (which == "return-law") code = cmd_return_law(ret);
    else if (which == "tail") code = cmd_tail(tail);
    else if (which == "lll") code = cmd_lll(lll);
    else if (which == "classify") code = cmd_classify(cls);
    else if (which == "green") code = cmd_green(green);
    else if (which == "ldp") code = cmd_ldp(ldp);
    else if (which == "chain") code = cmd_chain(chain);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  log(which + ": wall " +
      std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s, exit " +
      std::to_string(code));
  return code;
}
