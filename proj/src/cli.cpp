#include "qisec/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qisec/link_planner.hpp"
#include "qisec/monte_carlo.hpp"
#include "qisec/receivers.hpp"

namespace qisec {

using nlohmann::ordered_json;

void SweepSpec::validate() const {
  params.validate_per_mode();
  if (m_min < 1) throw InvalidArgument("m-min must be >= 1");
  if (m_max <= m_min) throw InvalidArgument("m-max must exceed m-min");
  if (points < 2) throw InvalidArgument("points must be >= 2");
}

std::vector<std::int64_t> sweep_grid(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::int64_t> grid;
  grid.reserve(spec.points);
  const double lo = static_cast<double>(spec.m_min);
  const double hi = static_cast<double>(spec.m_max);
  const int last = spec.points - 1;
  for (int i = 0; i <= last; ++i) {
    std::int64_t m;
    if (i == 0) {
      m = spec.m_min;
    } else if (i == last) {
      m = spec.m_max;
    } else {
      const double f = static_cast<double>(i) / last;
      const double v = spec.scale == SweepScale::kLog ? lo * std::exp(f * std::log(hi / lo))
                                                      : lo + f * (hi - lo);
      m = std::llround(v);
    }
    if (grid.empty() || m > grid.back()) grid.push_back(m);
  }
  return grid;
}

std::vector<SweepRow> compute_sweep(const SweepSpec& spec) {
  const auto grid = sweep_grid(spec);
  // Per-mode quantities do not depend on M; each row only rescales exponents.
  const auto alice = per_mode_overlap(alice_pair(spec.params));
  const auto eve = per_mode_overlap(eve_pair(spec.params));
  const auto opa = opa_model(spec.params);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::int64_t m : grid) {
    const auto a = bounds_from_overlap(alice, m);
    const auto e = bounds_from_overlap(eve, m);
    rows.push_back({m, a.chernoff_upper, opa_bhattacharyya(opa, m).upper, e.chernoff_upper,
                    e.lower});
  }
  return rows;
}

std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << r.m << ',' << format_sci(r.alice_qcb) << ',' << format_sci(r.alice_opa_bhatt) << ','
       << format_sci(r.eve_qcb_upper) << ',' << format_sci(r.eve_lower_bound) << '\n';
  }
}

namespace {

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSweepHeader) throw InvalidArgument("unexpected sweep CSV header: " + line);
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw InvalidArgument("sweep CSV row must have 5 fields: " + line);
    SweepRow r;
    const double m = parse_double(cells[0]);
    if (m != std::floor(m)) throw InvalidArgument("M must be an integer: " + cells[0]);
    r.m = static_cast<std::int64_t>(m);
    r.alice_qcb = parse_double(cells[1]);
    r.alice_opa_bhatt = parse_double(cells[2]);
    r.eve_qcb_upper = parse_double(cells[3]);
    r.eve_lower_bound = parse_double(cells[4]);
    rows.push_back(r);
  }
  if (!header_seen) throw InvalidArgument("sweep CSV has no header");
  return rows;
}

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || value.empty()) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key or value");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty() || args[0].rfind("-", 0) == 0) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::vector<std::string> out{args[0]};
  for (const auto& [key, value] : parse_config(in)) out.push_back("--" + key + "=" + value);
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t to_count(double v, const char* flag, std::int64_t min_value) {
  if (!std::isfinite(v) || v != std::floor(v) || v < static_cast<double>(min_value) || v > 9e18) {
    std::ostringstream msg;
    msg << flag << " must be an integer >= " << min_value << " (got " << v << ")";
    throw InvalidArgument(msg.str());
  }
  return static_cast<std::int64_t>(v);
}

// Resolved inputs of one invocation, in flag order.
struct RunRecord {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::string timestamp = timestamp_utc();

  void add(const std::string& key, double v) { inputs.emplace_back(key, format_exact(v)); }
  void add(const std::string& key, std::int64_t v) { inputs.emplace_back(key, std::to_string(v)); }
  void add(const std::string& key, const std::string& v) { inputs.emplace_back(key, v); }

  std::string replay() const {
    std::string s = std::string("qisec ") + command;
    for (const auto& [k, v] : inputs) s += " --" + k + "=" + v;
    return s;
  }

  void write_text_header(std::ostream& os) const {
    os << "# qisec " << kVersion << ' ' << command << '\n';
    os << "# timestamp: " << timestamp << '\n';
    os << "# replay: " << replay() << '\n';
  }

  ordered_json to_json() const {
    ordered_json in = ordered_json::object();
    for (const auto& [k, v] : inputs) in[k] = v;
    return {{"tool", "qisec"},
            {"version", kVersion},
            {"command", command},
            {"timestamp", timestamp},
            {"inputs", in}};
  }
};

struct ParamFlags {
  ProtocolParams params{0.004, 0.1, 1e4, 1e4, 20000};
  double modes = 20000;
};

void add_param_flags(CLI::App* sub, ParamFlags& f, bool with_kappa, bool with_modes) {
  sub->add_option("--ns", f.params.ns, "mean signal photons per mode N_S")->capture_default_str();
  if (with_kappa) {
    sub->add_option("--kappa", f.params.kappa, "one-way transmissivity kappa in (0,1)")
        ->capture_default_str();
  }
  sub->add_option("--g", f.params.gain, "Bob's amplifier gain G >= 1")->capture_default_str();
  sub->add_option("--nb", f.params.nb, "amplifier noise photons N_B >= G-1")
      ->capture_default_str();
  if (with_modes) {
    sub->add_option("--m", f.modes, "mode pairs per bit M")->capture_default_str();
  }
}

void record_params(RunRecord& rec, const ProtocolParams& p, bool with_kappa, bool with_modes) {
  rec.add("ns", p.ns);
  if (with_kappa) rec.add("kappa", p.kappa);
  rec.add("g", p.gain);
  rec.add("nb", p.nb);
  if (with_modes) rec.add("m", p.modes);
}

ordered_json bounds_json(const ErrorBounds& b) {
  return {{"chernoff_upper", b.chernoff_upper},
          {"bhattacharyya_upper", b.bhattacharyya_upper},
          {"lower", b.lower},
          {"s_opt", b.s_opt},
          {"per_mode_log_q_chernoff", b.log_q_chernoff},
          {"per_mode_log_q_bhattacharyya", b.log_q_bhattacharyya}};
}

ordered_json security_json(const SecurityReport& s) {
  return {{"alice_optimum_upper", s.alice_optimum_upper},
          {"alice_opa_upper", s.alice_opa_upper},
          {"eve_lower", s.eve_lower},
          {"eve_upper", s.eve_upper},
          {"ratio", s.ratio},
          {"difference", s.difference},
          {"in_regime", s.in_regime},
          {"insecure", s.insecure},
          {"unusable", s.unusable},
          {"secure", s.secure()}};
}

void write_security_text(std::ostream& out, const SecurityReport& s) {
  out << "alice_optimum_upper     " << format_sci(s.alice_optimum_upper) << '\n'
      << "alice_opa_upper         " << format_sci(s.alice_opa_upper) << '\n'
      << "eve_lower               " << format_sci(s.eve_lower) << '\n'
      << "eve_upper               " << format_sci(s.eve_upper) << '\n'
      << "eve_lower/alice_opa     " << format_sci(s.ratio) << '\n'
      << "eve_lower-alice_opa     " << format_sci(s.difference) << '\n'
      << "regime                  "
      << (s.in_regime ? "low-brightness/high-noise" : "outside low-brightness/high-noise")
      << '\n';
  if (s.insecure) out << "status                  INSECURE (Eve lower bound below threshold)\n";
  if (s.unusable) out << "status                  UNUSABLE (Alice error bound above ceiling)\n";
  if (s.secure()) out << "status                  secure\n";
}

int cmd_bounds(ParamFlags& f, bool json, std::ostream& out) {
  f.params.modes = to_count(f.modes, "--m", 1);
  f.params.validate();
  RunRecord rec{"bounds", {}};
  record_params(rec, f.params, true, true);

  const auto alice = alice_optimum_bounds(f.params);
  const auto eve = eve_optimum_bounds(f.params);
  const auto opa = opa_bhattacharyya(f.params);
  const auto approx = approx_exponents(f.params);

  if (json) {
    ordered_json j = rec.to_json();
    j["outputs"] = {
        {"alice_optimum", bounds_json(alice)},
        {"alice_opa",
         {{"bhattacharyya_upper", opa.upper},
          {"per_mode_log_q", opa.log_q},
          {"g_opa", opa.model.g_opa},
          {"n0", opa.model.n0},
          {"n1", opa.model.n1}}},
        {"eve_optimum", bounds_json(eve)},
        {"approx_exponents",
         {{"alice_opt", approx.alice_opt},
          {"eve_opt", approx.eve_opt},
          {"alice_opa", approx.alice_opa},
          {"in_regime", approx.in_regime}}}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  rec.write_text_header(out);
  out << "alice_optimum_chernoff  " << format_sci(alice.chernoff_upper) << "  (s* = "
      << alice.s_opt << ")\n"
      << "alice_optimum_bhatt     " << format_sci(alice.bhattacharyya_upper) << '\n'
      << "alice_opa_bhatt         " << format_sci(opa.upper) << "  (g_opa = "
      << format_exact(opa.model.g_opa) << ", n0 = " << opa.model.n0 << ", n1 = " << opa.model.n1
      << ")\n"
      << "eve_optimum_chernoff    " << format_sci(eve.chernoff_upper) << "  (s* = " << eve.s_opt
      << ")\n"
      << "eve_optimum_lower       " << format_sci(eve.lower) << '\n'
      << "regime                  "
      << (approx.in_regime ? "low-brightness/high-noise" : "outside low-brightness/high-noise")
      << '\n'
      << "approx_exponents        alice_opt=" << approx.alice_opt << " eve_opt=" << approx.eve_opt
      << " alice_opa=" << approx.alice_opa << '\n';
  return kExitOk;
}

struct SweepFlags {
  ParamFlags pf;
  double m_min = 1000;
  double m_max = 100000;
  int points = 50;
  std::string scale = "log";
  std::string out_path = "fig1.csv";
};

int cmd_sweep(SweepFlags& f, std::ostream& out) {
  SweepSpec spec;
  spec.m_min = to_count(f.m_min, "--m-min", 1);
  spec.m_max = to_count(f.m_max, "--m-max", 1);
  spec.points = f.points;
  spec.scale = f.scale == "linear" ? SweepScale::kLinear : SweepScale::kLog;
  spec.params = f.pf.params;
  spec.validate();

  RunRecord rec{"sweep", {}};
  record_params(rec, spec.params, true, false);
  rec.add("m-min", spec.m_min);
  rec.add("m-max", spec.m_max);
  rec.add("points", static_cast<std::int64_t>(spec.points));
  rec.add("scale", f.scale);
  rec.add("out", f.out_path);

  const auto rows = compute_sweep(spec);

  if (f.out_path == "-") {
    rec.write_text_header(out);
    write_sweep_csv(out, rows);
    return kExitOk;
  }
  std::filesystem::path path(f.out_path);
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir && path.is_relative()) {
    path = std::filesystem::path(dir) / path;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  rec.write_text_header(file);
  write_sweep_csv(file, rows);
  file.flush();
  if (!file) throw IoError("write failed for '" + path.string() + "'");
  out << "wrote " << rows.size() << " rows to " << path.string() << '\n';
  return kExitOk;
}

struct PlanFlags {
  ParamFlags pf;
  double km = 50.0;
  double db_per_km = 0.2;
  double w = 1e12;
  double t = 20e-9;
  double target = 1e-6;
  std::string receiver = "opa";
  double insecure_below = 0.25;
  double alice_ceiling = 1e-3;
};

int cmd_plan(PlanFlags& f, bool json, std::ostream& out) {
  const auto receiver = receiver_from_string(f.receiver);
  RunRecord rec{"plan", {}};
  rec.add("km", f.km);
  rec.add("db-per-km", f.db_per_km);
  rec.add("w", f.w);
  rec.add("t", f.t);
  record_params(rec, f.pf.params, false, false);
  rec.add("target", f.target);
  rec.add("receiver", f.receiver);
  rec.add("insecure-below", f.insecure_below);
  rec.add("alice-ceiling", f.alice_ceiling);

  const auto budget = budget_from_fiber(f.km, f.db_per_km, f.w, f.t);
  const auto params = params_for_link(budget, f.pf.params.ns, f.pf.params.gain, f.pf.params.nb);
  const auto margin = security_margin(params, {f.insecure_below, f.alice_ceiling});
  const auto needed = required_modes(params, f.target, receiver);

  if (json) {
    ordered_json j = rec.to_json();
    j["outputs"] = {{"link",
                     {{"kappa", budget.kappa},
                      {"total_loss_db", budget.total_loss_db()},
                      {"m", budget.modes},
                      {"bit_rate", budget.bit_rate}}},
                    {"security", security_json(margin)},
                    {"required_m", needed},
                    {"required_m_fits", needed <= budget.modes}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  rec.write_text_header(out);
  out << "kappa                   " << format_exact(budget.kappa) << '\n'
      << "total_loss_db           " << budget.total_loss_db() << '\n'
      << "m                       " << budget.modes << '\n'
      << "bit_rate                " << format_sci(budget.bit_rate) << " bit/s\n";
  write_security_text(out, margin);
  out << "required_m              " << needed << " (" << to_string(receiver) << ", target "
      << f.target << ")" << (needed <= budget.modes ? "" : "  exceeds available M") << '\n';
  return kExitOk;
}

struct McFlags {
  ParamFlags pf;
  double trials = 1e6;
  std::uint64_t seed = 1;
  int shards = 1;
};

int cmd_mc(McFlags& f, bool json, std::ostream& out) {
  McConfig cfg;
  cfg.params = f.pf.params;
  cfg.params.modes = to_count(f.pf.modes, "--m", 1);
  cfg.trials = to_count(f.trials, "--trials", 1);
  cfg.seed = f.seed;
  cfg.shards = f.shards;
  if (cfg.shards < 1) throw InvalidArgument("--shards must be >= 1");
  cfg.params.validate();

  RunRecord rec{"mc", {}};
  record_params(rec, cfg.params, true, true);
  rec.add("trials", cfg.trials);
  rec.add("seed", std::to_string(cfg.seed));
  rec.add("shards", static_cast<std::int64_t>(cfg.shards));

  const auto bound = opa_bhattacharyya(cfg.params);
  const auto res = run_mc(cfg);
  auto warnings = res.warnings;
  if (res.ci_lo > bound.upper) {
    warnings.push_back("empirical error exceeds the Bhattacharyya bound beyond the 95% interval");
  }

  if (json) {
    ordered_json j = rec.to_json();
    j["outputs"] = {{"empirical_error", res.empirical_error},
                    {"errors", res.errors},
                    {"trials_used", res.trials_used},
                    {"wilson_ci95", {res.ci_lo, res.ci_hi}},
                    {"threshold", res.threshold},
                    {"bhattacharyya_upper", bound.upper},
                    {"warnings", warnings}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  rec.write_text_header(out);
  for (const auto& w : warnings) out << "WARNING: " << w << '\n';
  out << "empirical_error         " << format_sci(res.empirical_error) << "  (" << res.errors
      << " / " << res.trials_used << ")\n"
      << "wilson_ci95             [" << format_sci(res.ci_lo) << ", " << format_sci(res.ci_hi)
      << "]\n"
      << "threshold               " << format_exact(res.threshold) << '\n'
      << "bhattacharyya_upper     " << format_sci(bound.upper) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-illumination secure-link analysis", "qisec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  bool json = false;
  std::string config_path;

  ParamFlags bounds_flags;
  auto* bounds = app.add_subcommand("bounds", "error-probability bounds for one operating point");
  add_param_flags(bounds, bounds_flags, true, true);

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "bounds versus M as CSV");
  add_param_flags(sweep, sweep_flags.pf, true, false);
  sweep->add_option("--m-min", sweep_flags.m_min, "smallest M")->capture_default_str();
  sweep->add_option("--m-max", sweep_flags.m_max, "largest M")->capture_default_str();
  sweep->add_option("--points", sweep_flags.points, "number of sweep points")
      ->capture_default_str();
  sweep->add_option("--scale", sweep_flags.scale, "log or linear")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  sweep->add_option("--out", sweep_flags.out_path,
                    std::string("output CSV path ('-' for stdout); relative paths resolve "
                                "against $") + kOutputDirEnv + " when set")
      ->capture_default_str();

  PlanFlags plan_flags;
  auto* plan = app.add_subcommand("plan", "fiber link budget and security report");
  plan->add_option("--km", plan_flags.km, "fiber length in km")->capture_default_str();
  plan->add_option("--db-per-km", plan_flags.db_per_km, "fiber loss in dB/km")
      ->capture_default_str();
  plan->add_option("--w", plan_flags.w, "SPDC phase-matching bandwidth W in Hz")
      ->capture_default_str();
  plan->add_option("--t", plan_flags.t, "bit duration T in s")->capture_default_str();
  add_param_flags(plan, plan_flags.pf, false, false);
  plan->add_option("--target", plan_flags.target, "target error probability for Alice")
      ->capture_default_str();
  plan->add_option("--receiver", plan_flags.receiver, "opa or optimum")
      ->check(CLI::IsMember({"opa", "optimum"}))
      ->capture_default_str();
  plan->add_option("--insecure-below", plan_flags.insecure_below,
                   "flag as insecure when Eve's lower bound is below this")
      ->capture_default_str();
  plan->add_option("--alice-ceiling", plan_flags.alice_ceiling,
                   "flag as unusable when Alice's OPA bound is above this")
      ->capture_default_str();

  McFlags mc_flags;
  auto* mc = app.add_subcommand("mc", "Monte Carlo error rate of the OPA receiver");
  add_param_flags(mc, mc_flags.pf, true, true);
  mc->add_option("--trials", mc_flags.trials, "number of bits simulated")->capture_default_str();
  mc->add_option("--seed", mc_flags.seed, "RNG seed")->capture_default_str();
  mc->add_option("--shards", mc_flags.shards, "parallel shards (shard i uses seed + i)")
      ->capture_default_str();

  for (auto* sub : {bounds, sweep, plan, mc}) {
    sub->add_option("--config", config_path, "flat key = value file; explicit flags win");
    if (sub != sweep) sub->add_flag("--json", json, "emit JSON instead of text");
  }

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  try {
    if (*bounds) return cmd_bounds(bounds_flags, json, out);
    if (*sweep) return cmd_sweep(sweep_flags, out);
    if (*plan) return cmd_plan(plan_flags, json, out);
    if (*mc) return cmd_mc(mc_flags, json, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitBadInput;
}

}  // namespace qisec
