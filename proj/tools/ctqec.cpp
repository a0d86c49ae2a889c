// ctqec: build, verify and simulate continuous-time QEC protocols.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 numeric failure.

#include "ctqec/ctqec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace {

using namespace ctqec;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

constexpr const char* kReportSchema = "ctqec-report/1";
constexpr const char* kTraceSchema = "ctqec-trace/1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Output goes to --output when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// ---- reports -------------------------------------------------------------

struct Check {
  std::string name;
  double value;
  std::string requirement;
  bool pass;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> info;
  std::vector<Check> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      ordered_json j;
      j["schema"] = kReportSchema;
      j["command"] = command;
      for (const auto& [k, v] : info) j["info"][k] = v;
      j["checks"] = ordered_json::array();
      for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"requirement", c.requirement}, {"pass", c.pass}});
      j["pass"] = all_pass();
      os << j.dump(2) << '\n';
      return;
    }
    os << "# " << kReportSchema << ' ' << command << '\n';
    for (const auto& [k, v] : info) os << "# " << k << '=' << v << '\n';
    os << "check,value,requirement,pass\n";
    for (const auto& c : checks) os << c.name << ',' << fmt(c.value) << ',' << c.requirement << ',' << (c.pass ? 1 : 0) << '\n';
  }
};

// ---- traces --------------------------------------------------------------

struct Column {
  std::string name;
  std::vector<double> values;
};

std::vector<Column> trace_columns(const SimulationTrace& tr, const std::string& prefix) {
  std::vector<Column> cols{{prefix + "codeword_fidelity", tr.codeword_fidelity},
                           {prefix + "correctable_overlap", tr.correctable_overlap}};
  if (!tr.weights.empty()) {
    for (std::size_t i = 0; i < 4; ++i) {
      Column c{prefix + "w" + std::to_string(i), {}};
      for (const auto& w : tr.weights) c.values.push_back(w[i]);
      cols.push_back(std::move(c));
    }
  }
  return cols;
}

void write_table(std::ostream& os, const std::string& format, const std::vector<double>& times,
                 const std::vector<Column>& cols, const std::vector<std::pair<std::string, std::string>>& meta) {
  if (format == "json") {
    ordered_json j;
    j["schema"] = kTraceSchema;
    for (const auto& [k, v] : meta) j["metadata"][k] = v;
    j["t"] = times;
    for (const auto& c : cols) j[c.name] = c.values;
    os << j.dump() << '\n';
    return;
  }
  os << "# " << kTraceSchema;
  for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
  os << '\n' << 't';
  for (const auto& c : cols) os << ',' << c.name;
  os << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << fmt(times[i]);
    for (const auto& c : cols) os << ',' << (i < c.values.size() ? fmt(c.values[i]) : std::string("nan"));
    os << '\n';
  }
}

// ---- config files --------------------------------------------------------

// Flat key=value lines; '#' starts a comment. Keys are long option names
// with '-' or '_'.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    for (auto& ch : key)
      if (ch == '_') ch = '-';
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    args.push_back("--" + key);
    args.push_back(trim(line.substr(eq + 1)));
  }
  return args;
}

// Splices config values in front of the command-line options of the
// subcommand so that flags given explicitly win (options take the last value).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> raw(argv + 1, argv + argc);
  std::vector<std::string> rest, cfg;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == "--config") {
      if (i + 1 >= raw.size()) throw UsageError("--config requires a file");
      const auto more = config_arguments(raw[++i]);
      cfg.insert(cfg.end(), more.begin(), more.end());
    } else if (raw[i].rfind("--config=", 0) == 0) {
      const auto more = config_arguments(raw[i].substr(9));
      cfg.insert(cfg.end(), more.begin(), more.end());
    } else {
      rest.push_back(raw[i]);
    }
  }
  if (cfg.empty() || rest.empty()) return rest;
  std::vector<std::string> out;
  std::size_t head = 1;
  if (rest[0] == "codes" && rest.size() > 1) head = 2;
  out.insert(out.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(head));
  out.insert(out.end(), cfg.begin(), cfg.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(head), rest.end());
  return out;
}

// ---- shared option parsing -----------------------------------------------

std::array<int, 3> parse_signs(const std::string& s) {
  std::array<int, 3> out{};
  std::stringstream ss(s);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3 || (item != "1" && item != "+1" && item != "-1")) throw UsageError("signs must look like 1,-1,1");
    out[i++] = item == "-1" ? -1 : 1;
  }
  if (i != 3) throw UsageError("signs must have three entries");
  return out;
}

std::string signs_text(const std::array<int, 3>& s) {
  return std::to_string(s[0]) + ";" + std::to_string(s[1]) + ";" + std::to_string(s[2]);
}

struct KappaSpec {
  double value = 0.0;
  bool calibrated = false;
  double kappa2 = 0.0;
};

KappaSpec parse_kappa(const std::string& text) {
  KappaSpec k;
  try {
    std::size_t used = 0;
    if (text.rfind("calibrated:", 0) == 0) {
      k.calibrated = true;
      k.kappa2 = std::stod(text.substr(11), &used);
      if (used != text.size() - 11 || !(k.kappa2 > 0.0)) throw std::invalid_argument("bad");
    } else {
      k.value = std::stod(text, &used);
      if (used != text.size() || !(k.value >= 0.0)) throw std::invalid_argument("bad");
    }
  } catch (const std::exception&) {
    throw UsageError("kappa must be a non-negative rate or calibrated:<kappa2>");
  }
  return k;
}

DiamondNormOptions diamond_options(int restarts, std::uint64_t seed) {
  DiamondNormOptions o;
  o.restarts = restarts;
  o.seed = seed;
  return o;
}

// ---- commands ------------------------------------------------------------

struct VerifyArgs {
  std::string code;
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  int trials = 8;
  std::string format = "json";
  std::string output;
};

int cmd_verify(const VerifyArgs& a) {
  const auto code = resolve_code(a.code);
  const int n = code.n(), k = code.k();
  if (!(a.epsilon > 0.0 && a.epsilon < 0.5)) throw UsageError("verify: epsilon must lie in (0, 0.5)");
  Report rep;
  rep.command = "verify";
  rep.info = {{"code", code.name()}, {"n", std::to_string(n)}, {"k", std::to_string(k)},
              {"epsilon", fmt(a.epsilon)}, {"seed", std::to_string(a.seed)}};

  const int rank = kraus_rank(target_map(n, k, a.epsilon));
  const auto expected_rank = static_cast<int>(pow2(n - k)) + 1;
  rep.checks.push_back({"target_kraus_rank", double(rank), "= " + std::to_string(expected_rank), rank == expected_rank});
  const auto p1 = build_protocol(n, k, a.epsilon);
  const auto p2 = build_protocol(n, k, a.epsilon / 2);
  rep.checks.push_back({"ancilla_qubits", double(p1.ancilla_qubits()), "= " + std::to_string(minimal_ancilla_qubits(rank)),
                        p1.ancilla_qubits() == minimal_ancilla_qubits(rank)});

  std::vector<ComplexMatrix> fam;
  for (std::size_t j = 0; j < static_cast<std::size_t>(p1.outcome_count()); ++j) fam.push_back(p1.kraus(j));
  const double compl_res = KrausChannel(fam, false).completeness_residual();
  rep.checks.push_back({"completeness_residual", compl_res, "<= 1e-12", compl_res <= 1e-12});
  const double herm = hermiticity_residual(p1.measurement_ham_factor());
  rep.checks.push_back({"measurement_hamiltonian_hermiticity", herm, "<= 1e-12", herm <= 1e-12});

  const auto d1 = verify_dilation(p1, a.trials, a.seed);
  const auto d2 = verify_dilation(p2, a.trials, a.seed);
  rep.checks.push_back({"order_conditions", d1.order_conditions.max(), "<= 1e-10", d1.order_conditions.max() <= 1e-10});
  const double dil_ratio = d1.residual / d2.residual;
  rep.checks.push_back({"dilation_residual", d1.residual, "reported", true});
  rep.checks.push_back({"dilation_scaling_ratio", dil_ratio, "in [6, 10]", dil_ratio >= 6.0 && dil_ratio <= 10.0});

  const double c1 = choi_distance(effective_channel(p1), target_map(n, k, a.epsilon));
  const double c2 = choi_distance(effective_channel(p2), target_map(n, k, a.epsilon / 2));
  const double choi_ratio = c1 / c2;
  rep.checks.push_back({"channel_choi_distance", c1, "reported", true});
  // at least third order; the composed channel is even in epsilon, so ~16
  rep.checks.push_back({"channel_scaling_ratio", choi_ratio, ">= 6", choi_ratio >= 6.0});

  Sink sink(a.output);
  rep.write(sink.out(), a.format);
  return rep.all_pass() ? kExitOk : kExitVerify;
}

struct SimulateArgs {
  std::string code = "three_qubit_bit_flip";
  std::string noise = "bit_flip";
  std::string depolarizing = "per_pauli";
  double lambda = 1.0;
  std::string kappa = "100";
  double gamma2 = -1.0;
  std::string policy = "constant";
  std::string compare;
  std::string model = "auto";
  double t_end = 5.0;
  double dt = 1e-4;
  double samples = 100.0;
  std::uint64_t seed = 1;
  int restarts = 32;
  std::string format = "csv";
  std::string output;
};

double resolve_kappa(const KappaSpec& k, double gamma2, int restarts, std::uint64_t seed) {
  if (!k.calibrated) return k.value;
  ADLMap m;
  m.kappa2 = k.kappa2;
  m.gamma2 = gamma2 > 0.0 ? gamma2 : 2.0 * k.kappa2;
  return calibrate_kappa(m, diamond_options(restarts, seed)).kappa;
}

int cmd_simulate(const SimulateArgs& a) {
  const auto code = resolve_code(a.code);
  NoiseModel noise{parse_noise_kind(a.noise), a.lambda, code.n()};
  if (a.depolarizing == "split") noise.depolarizing = DepolarizingRate::split;
  else if (a.depolarizing != "per_pauli") throw UsageError("depolarizing must be per_pauli or split");
  const double kappa = resolve_kappa(parse_kappa(a.kappa), a.gamma2, a.restarts, a.seed);
  std::vector<DeltaPolicy> policies{parse_policy(a.policy)};
  if (!a.compare.empty()) policies.push_back(parse_policy(a.compare));

  const bool weights_ok = code.name() == "three_qubit_bit_flip" && noise.kind == NoiseKind::bit_flip;
  std::string model = a.model;
  if (model == "auto") model = weights_ok ? "weights" : "full";
  if (model != "weights" && model != "full") throw UsageError("model must be auto, weights or full");
  if (model == "weights" && !weights_ok) throw UsageError("the weight model needs three_qubit_bit_flip with bit_flip noise");

  StepOptions opt;
  opt.samples_per_unit = a.samples;
  opt.track_weights = weights_ok;
  std::vector<SimulationTrace> traces;
  std::string failure;
  for (auto policy : policies) {
    try {
      if (model == "weights") traces.push_back(integrate_weights(a.lambda, kappa, policy, a.t_end, a.dt, opt));
      else traces.push_back(simulate_code(code, noise, kappa, policy, a.t_end, a.dt, opt));
    } catch (const IntegrationError& e) {
      // keep what was integrated; the trace is flagged and the exit code is 3
      traces.push_back(e.partial());
      failure = e.what();
      break;
    }
  }
  std::vector<Column> cols = trace_columns(traces[0], "");
  if (traces.size() > 1) {
    auto more = trace_columns(traces[1], std::string(to_string(policies[1])) + "_");
    cols.insert(cols.end(), more.begin(), more.end());
  }
  const std::vector<std::pair<std::string, std::string>> meta{
      {"code", code.name()}, {"noise", to_string(noise.kind)}, {"lambda", fmt(a.lambda)}, {"kappa", fmt(kappa)},
      {"policy", to_string(policies[0])}, {"compare", a.compare.empty() ? "none" : a.compare}, {"model", model},
      {"dt", fmt(a.dt)}, {"seed", std::to_string(a.seed)}, {"complete", failure.empty() ? "true" : "false"}};
  Sink sink(a.output);
  write_table(sink.out(), a.format, traces[0].times, cols, meta);
  if (!failure.empty()) {
    std::cerr << "numeric failure: " << failure << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

struct CalibrateArgs {
  double kappa2 = 64.0;
  double gamma2 = 128.0;
  std::string signs = "1,1,1";
  bool all_signs = false;
  int restarts = 32;
  std::uint64_t seed = DiamondNormOptions{}.seed;
  std::string format = "json";
  std::string output;
};

int cmd_calibrate(const CalibrateArgs& a) {
  if (!(a.kappa2 > 0.0) || !(a.gamma2 > 0.0)) throw UsageError("calibrate: rates must be positive");
  const auto opt = diamond_options(a.restarts, a.seed);
  std::vector<std::array<int, 3>> choices{parse_signs(a.signs)};
  if (a.all_signs) {
    choices.clear();
    for (int m = 0; m < 8; ++m) choices.push_back({m & 4 ? -1 : 1, m & 2 ? -1 : 1, m & 1 ? -1 : 1});
  }
  Report rep;
  rep.command = "calibrate";
  rep.info = {{"kappa2", fmt(a.kappa2)}, {"gamma2", fmt(a.gamma2)}, {"restarts", std::to_string(a.restarts)},
              {"seed", std::to_string(a.seed)}};
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    ADLMap m;
    m.kappa2 = a.kappa2;
    m.gamma2 = a.gamma2;
    m.signs = choices[i];
    const auto c = calibrate_kappa(m, opt);
    const std::string tag = "signs=" + signs_text(choices[i]);
    rep.checks.push_back({"adl_norm[" + tag + "]", c.adl_norm, "reported", true});
    rep.checks.push_back({"kappa[" + tag + "]", c.kappa, "reported", true});
    rep.checks.push_back({"kappa_over_kappa2[" + tag + "]", c.ratio, "reported", true});
    lo = i == 0 ? c.kappa : std::min(lo, c.kappa);
    hi = i == 0 ? c.kappa : std::max(hi, c.kappa);
  }
  if (choices.size() > 1) {
    const double spread = (hi - lo) / hi;
    rep.checks.push_back({"sign_spread", spread, "<= 1e-3", spread <= 1e-3});
  }
  Sink sink(a.output);
  rep.write(sink.out(), a.format);
  return rep.all_pass() ? kExitOk : kExitVerify;
}

struct CompareArgs {
  double lambda = 1.0;
  double kappa2 = 64.0;
  double gamma2 = 128.0;
  std::string kappa;
  std::string signs = "1,1,1";
  double t_end = 0.5;
  double dt = 1e-5;
  double samples = 100.0;
  int restarts = 32;
  std::uint64_t seed = DiamondNormOptions{}.seed;
  std::string format = "csv";
  std::string output;
};

int cmd_compare(const CompareArgs& a) {
  ADLMap m;
  m.kappa2 = a.kappa2;
  m.gamma2 = a.gamma2;
  m.signs = parse_signs(a.signs);
  const double kappa = a.kappa.empty() ? calibrate_kappa(m, diamond_options(a.restarts, a.seed)).kappa
                                       : resolve_kappa(parse_kappa(a.kappa), a.gamma2, a.restarts, a.seed);
  StepOptions opt;
  opt.samples_per_unit = a.samples;
  const auto tr = compare_with_adl(m, a.lambda, kappa, a.t_end, a.dt, opt);
  std::vector<Column> cols = trace_columns(tr.ours, "ours_");
  auto adl = trace_columns(tr.adl, "adl_");
  cols.insert(cols.end(), adl.begin(), adl.end());
  const std::vector<std::pair<std::string, std::string>> meta{
      {"code", m.code.name()}, {"lambda", fmt(a.lambda)},    {"kappa", fmt(kappa)},
      {"kappa2", fmt(a.kappa2)}, {"gamma2", fmt(a.gamma2)}, {"signs", signs_text(m.signs)},
      {"adl", "averaged_map_reconstruction_sign_dependent"}};
  Sink sink(a.output);
  write_table(sink.out(), a.format, tr.ours.times, cols, meta);
  return kExitOk;
}

struct DumpArgs {
  std::string code = "three_qubit_bit_flip";
  double epsilon = 0.05;
  std::string layout = "factor";
  std::string output;
};

int cmd_dump(const DumpArgs& a) {
  const auto code = resolve_code(a.code);
  DumpLayout layout;
  if (a.layout == "factor") layout = DumpLayout::factor;
  else if (a.layout == "full") layout = DumpLayout::full;
  else throw UsageError("layout must be factor or full");
  const auto p = build_protocol(code.n(), code.k(), a.epsilon);
  Sink sink(a.output);
  write_protocol_dump(sink.out(), p, layout);
  return kExitOk;
}

int cmd_codes_list(const std::string& format) {
  if (format == "json") {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["codes"] = ordered_json::array();
    for (const auto& name : builtin_code_names()) {
      const auto c = builtin_code(name);
      std::vector<std::string> gens;
      for (const auto& g : c.generators()) gens.push_back(g.to_string());
      j["codes"].push_back({{"name", name}, {"n", c.n()}, {"k", c.k()}, {"generators", gens}});
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "name,n,k,generators\n";
  for (const auto& name : builtin_code_names()) {
    const auto c = builtin_code(name);
    std::cout << name << ',' << c.n() << ',' << c.k() << ',';
    for (std::size_t i = 0; i < c.generators().size(); ++i) std::cout << (i ? " " : "") << c.generators()[i].to_string();
    std::cout << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time quantum error correction protocols"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  const auto formats = CLI::IsMember({"csv", "json"});

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Build the minimal protocol for a code and check its invariants");
  verify->add_option("--code", va.code, "Builtin code name or code file")->required();
  verify->add_option("--epsilon", va.epsilon, "Measurement strength");
  verify->add_option("--seed", va.seed, "Seed for the random dilation probes");
  verify->add_option("--trials", va.trials, "Random probe states per dilation check")->check(CLI::PositiveNumber);
  verify->add_option("--format", va.format)->check(formats);
  verify->add_option("--output", va.output, "Report file (default stdout)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Integrate the corrected dynamics and emit a trace");
  simulate->add_option("--code", sa.code);
  simulate->add_option("--noise", sa.noise)->check(CLI::IsMember({"bit_flip", "depolarizing"}));
  simulate->add_option("--depolarizing", sa.depolarizing, "Per-Pauli rate: per_pauli (lambda) or split (lambda/3)");
  simulate->add_option("--lambda", sa.lambda)->check(CLI::NonNegativeNumber);
  simulate->add_option("--kappa", sa.kappa, "Correction rate, or calibrated:<kappa2>");
  simulate->add_option("--gamma2", sa.gamma2, "ADL gamma2 for calibrated kappa (default 2 kappa2)");
  simulate->add_option("--policy", sa.policy)->check(CLI::IsMember({"constant", "optimal"}));
  simulate->add_option("--compare", sa.compare, "Second policy emitted alongside")->check(CLI::IsMember({"constant", "optimal"}));
  simulate->add_option("--model", sa.model, "auto, weights or full");
  simulate->add_option("--t-end", sa.t_end)->check(CLI::PositiveNumber);
  simulate->add_option("--dt", sa.dt)->check(CLI::PositiveNumber);
  simulate->add_option("--samples", sa.samples, "Samples per unit time")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed);
  simulate->add_option("--restarts", sa.restarts)->check(CLI::PositiveNumber);
  simulate->add_option("--format", sa.format)->check(formats);
  simulate->add_option("--output", sa.output);

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate", "Match the correction rate to the ADL map strength");
  calibrate->add_option("--kappa2", ca.kappa2);
  calibrate->add_option("--gamma2", ca.gamma2);
  calibrate->add_option("--signs", ca.signs, "Feedback signs, e.g. 1,-1,1");
  calibrate->add_flag("--all-signs", ca.all_signs, "Evaluate all eight sign choices");
  calibrate->add_option("--restarts", ca.restarts)->check(CLI::PositiveNumber);
  calibrate->add_option("--seed", ca.seed);
  calibrate->add_option("--format", ca.format)->check(formats);
  calibrate->add_option("--output", ca.output);

  CompareArgs cm;
  auto* compare = app.add_subcommand("compare", "Minimal protocol against the ADL averaged map");
  compare->add_option("--lambda", cm.lambda)->check(CLI::NonNegativeNumber);
  compare->add_option("--kappa2", cm.kappa2);
  compare->add_option("--gamma2", cm.gamma2);
  compare->add_option("--kappa", cm.kappa, "Override the calibrated rate");
  compare->add_option("--signs", cm.signs);
  compare->add_option("--t-end", cm.t_end)->check(CLI::PositiveNumber);
  compare->add_option("--dt", cm.dt)->check(CLI::PositiveNumber);
  compare->add_option("--samples", cm.samples)->check(CLI::PositiveNumber);
  compare->add_option("--restarts", cm.restarts)->check(CLI::PositiveNumber);
  compare->add_option("--seed", cm.seed);
  compare->add_option("--format", cm.format)->check(formats);
  compare->add_option("--output", cm.output);

  DumpArgs da;
  auto* dump = app.add_subcommand("dump", "Write the protocol matrices as text");
  dump->add_option("--code", da.code);
  dump->add_option("--epsilon", da.epsilon);
  dump->add_option("--layout", da.layout, "factor (syndrome factor) or full");
  dump->add_option("--output", da.output);

  std::string codes_format = "csv";
  auto* codes = app.add_subcommand("codes", "Code catalogue");
  codes->require_subcommand(1);
  auto* codes_list = codes->add_subcommand("list", "List builtin codes");
  codes_list->add_option("--format", codes_format)->check(formats);

  // --config is consumed before CLI11 sees the arguments
  for (auto* sub : {verify, simulate, calibrate, compare, dump})
    sub->footer("Options may also come from --config FILE (key=value lines); explicit flags win.");

  try {
    auto args = expand_config(argc, argv);
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
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*simulate) return cmd_simulate(sa);
    if (*calibrate) return cmd_calibrate(ca);
    if (*compare) return cmd_compare(cm);
    if (*dump) return cmd_dump(da);
    if (*codes_list) return cmd_codes_list(codes_format);
  } catch (const CodeFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IntegrationError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << " (best lower bound " << fmt(e.best_lower_bound()) << ")\n";
    return kExitNumeric;
  } catch (const DegenerateWeightsError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
