#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "anderson/asymptotics.hpp"
#include "anderson/experiments.hpp"
#include "anderson/fb_process.hpp"
#include "anderson/spectrum.hpp"

namespace anderson::cli {

using json = nlohmann::ordered_json;

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys{
      {"n", KeyType::count, "chain length N"},
      {"dist", KeyType::text, "potential family: uniform or gaussian"},
      {"lo", KeyType::real, "uniform lower end"},
      {"hi", KeyType::real, "uniform upper end"},
      {"mean", KeyType::real, "gaussian mean"},
      {"std", KeyType::real, "gaussian standard deviation"},
      {"eps", KeyType::real, "disorder strength multiplying the draw"},
      {"lambda", KeyType::real, "energy"},
      {"lambda_lo", KeyType::real, "lower end of the energy range"},
      {"lambda_hi", KeyType::real, "upper end of the energy range"},
      {"points", KeyType::count, "energy points in the range"},
      {"realizations", KeyType::count, "disorder realizations or instances"},
      {"steps", KeyType::count, "chain steps"},
      {"batches", KeyType::count, "batches for the variance estimate"},
      {"burnin", KeyType::count, "discarded chain steps"},
      {"bins", KeyType::count, "histogram bins"},
      {"phase_bins", KeyType::count, "phase bins of the invariant measure"},
      {"method", KeyType::text, "dos method: counting, invariant or both"},
      {"bandwidth", KeyType::real, "kernel half-width h"},
      {"bias_check", KeyType::integer, "1 adds h/2 on 4x the pairs"},
      {"observables", KeyType::text, "comma list of all, window:a:b, sin2:a:b:j, psi2:a:b:x"},
      {"pairs", KeyType::count, "forward/backward chain pairs per energy point"},
      {"replicas", KeyType::count, "independent replicas for the standard error"},
      {"cells", KeyType::count, "energy cells of the integration grid"},
      {"max_lag", KeyType::count, "largest autocorrelation lag"},
      {"t0", KeyType::real, "left bath temperature"},
      {"tn", KeyType::real, "right bath temperature"},
      {"x", KeyType::text, "comma list of sites; empty for N/2 + c sqrt(N), c in {-1, 0, 1}"},
      {"s_points", KeyType::count, "points of the rescaled profile grid"},
      {"table_points", KeyType::count, "energy points of the gamma/sigma table"},
      {"table_steps", KeyType::count, "chain steps per table point"},
      {"kind", KeyType::text, "figure kind: fig1 or fig2"},
      {"grid_factor", KeyType::count, "periodic grid cells per site"},
      {"vector", KeyType::integer, "eigenvector index to dump, -1 for eigenvalues"},
      {"tol", KeyType::real, "eigenvalue bracket width"},
      {"seed", KeyType::seed, "master seed"},
      {"workers", KeyType::count, "worker threads"},
      {"out", KeyType::text, "output path, empty for stdout"},
      {"format", KeyType::text, "csv or json"},
  };
  return keys;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"spectrum", "dos",      "lyapunov",    "invariant-measure",
                                              "mixing",   "fb-verify", "dtheta-check", "tails",
                                              "temperature", "critical", "periodic",   "figure"};
  return names;
}

namespace {

const KeyInfo* find_key(const std::string& key) {
  for (const auto& k : config_keys())
    if (key == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && v.front() == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last || first == last)
    throw ConfigError("key '" + key + "': '" + v + "' is not a valid number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError("key '" + key + "' must be finite");
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Defaults = std::map<std::string, std::string>;

const Defaults& common_defaults() {
  static const Defaults d{{"dist", "uniform"}, {"lo", "0"},       {"hi", "1"},     {"mean", "0"},
                          {"std", "1"},        {"eps", "1"},      {"seed", "1"},   {"workers", "1"},
                          {"out", ""},         {"format", "csv"}};
  return d;
}

const Defaults& command_defaults(const std::string& command) {
  static const std::map<std::string, Defaults> table{
      {"spectrum", {{"n", "100"}, {"vector", "-1"}, {"tol", "1e-12"}}},
      {"dos",
       {{"n", "2000"},
        {"realizations", "50"},
        {"lambda_lo", "-2"},
        {"lambda_hi", "3"},
        {"bins", "50"},
        {"points", "200"},
        {"phase_bins", "256"},
        {"steps", "200000"},
        {"method", "both"}}},
      {"lyapunov",
       {{"lambda_lo", "0.5"}, {"lambda_hi", "0.5"}, {"points", "1"}, {"steps", "1000000"}, {"batches", "100"}}},
      {"invariant-measure", {{"lambda", "0.5"}, {"phase_bins", "256"}, {"burnin", "1000"}, {"steps", "1000000"}}},
      {"mixing", {{"lambda", "0.5"}, {"max_lag", "100"}, {"steps", "1000000"}}},
      {"fb-verify",
       {{"n", "40"},
        {"observables", "window:0.5:1.5,sin2:0.5:1.5:20"},
        {"realizations", "100000"},
        {"pairs", "2000"},
        {"replicas", "20"},
        {"cells", "400"},
        {"bandwidth", "0.02"},
        {"bias_check", "1"}}},
      {"dtheta-check", {{"n", "100"}, {"realizations", "100"}, {"lambda_lo", "-2"}, {"lambda_hi", "3"}}},
      {"tails",
       {{"n", "500"},
        {"realizations", "2000"},
        {"s_points", "501"},
        {"table_points", "100"},
        {"table_steps", "1000000"},
        {"batches", "100"}}},
      {"temperature",
       {{"n", "400"},
        {"realizations", "500"},
        {"t0", "1"},
        {"tn", "2"},
        {"x", ""},
        {"table_points", "100"},
        {"table_steps", "1000000"},
        {"batches", "100"}}},
      {"critical",
       {{"dist", "gaussian"}, {"mean", "0"}, {"std", "2"}, {"n", "500"}, {"realizations", "1000"}, {"s_points", "501"}}},
      {"periodic", {{"n", "3000"}, {"hi", "0.3"}, {"grid_factor", "4"}, {"tol", "1e-12"}}},
      {"figure", {{"kind", "fig1"}, {"n", "1000"}, {"grid_factor", "4"}}},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + command + "'");
  return it->second;
}

}  // namespace

RunConfig RunConfig::defaults(const std::string& command) {
  RunConfig c;
  c.command_ = command;
  const Defaults& own = command_defaults(command);
  c.values_ = common_defaults();
  for (const auto& [k, v] : own) c.values_[k] = v;
  return c;
}

RunConfig RunConfig::from_text(const std::string& text) {
  std::string command;
  for (const auto& line : split(text, '\n')) {
    if (line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos && trim(line.substr(0, eq)) == "command") command = trim(line.substr(eq + 1));
  }
  if (command.empty()) throw ConfigError("config text has no 'command' line");
  RunConfig c = defaults(command);
  c.merge_text(text);
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "command") {
    if (value != command_) throw ConfigError("config is for '" + value + "', not '" + command_ + "'");
    return;
  }
  if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

void RunConfig::merge_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::merge_environment() {
  if (const char* s = std::getenv("ANDERSON_SEED")) set("seed", s);
  if (const char* w = std::getenv("ANDERSON_WORKERS")) set("workers", w);
}

std::string RunConfig::to_text() const {
  std::string out = "command=" + command_ + "\n";
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("subcommand '" + command_ + "' has no value for '" + key + "'");
  return it->second;
}

std::size_t RunConfig::count(const std::string& key) const {
  const auto v = parse_number<long long>(key, text(key));
  if (v < 1) throw ConfigError("key '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

long long RunConfig::integer(const std::string& key) const { return parse_number<long long>(key, text(key)); }

double RunConfig::real(const std::string& key) const { return parse_number<double>(key, text(key)); }

std::uint64_t RunConfig::seed() const { return parse_number<std::uint64_t>("seed", text("seed")); }

void RunConfig::validate() const {
  command_defaults(command_);
  for (const auto& [k, v] : values_) {
    const KeyInfo* info = find_key(k);
    if (!info) throw ConfigError("unknown key '" + k + "'");
    switch (info->type) {
      case KeyType::count:
        count(k);
        break;
      case KeyType::integer:
        integer(k);
        break;
      case KeyType::real:
        real(k);
        break;
      case KeyType::seed:
        seed();
        break;
      case KeyType::text:
        break;
    }
  }
  const std::string& dist = text("dist");
  if (dist == "uniform") {
    if (!(real("lo") < real("hi"))) throw ConfigError("uniform potential requires lo < hi");
  } else if (dist == "gaussian") {
    if (!(real("std") > 0.0)) throw ConfigError("gaussian potential requires std > 0");
  } else {
    throw ConfigError("dist must be uniform or gaussian (the potential law needs a density)");
  }
  if (!(real("eps") > 0.0)) throw ConfigError("eps must be > 0");
  const std::string& format = text("format");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (has("lambda_lo") && !(real("lambda_lo") <= real("lambda_hi")))
    throw ConfigError("lambda_lo must not exceed lambda_hi");
  if (has("bandwidth")) {
    const double h = real("bandwidth");
    if (!(h > 0.0 && h < 0.25 * std::numbers::pi)) throw ConfigError("bandwidth must lie in (0, pi/4)");
  }
  if (has("bias_check") && integer("bias_check") != 0 && integer("bias_check") != 1)
    throw ConfigError("bias_check must be 0 or 1");
  if (has("method")) {
    const std::string& m = text("method");
    if (m != "counting" && m != "invariant" && m != "both") throw ConfigError("method must be counting, invariant or both");
  }
  if (has("kind") && text("kind") != "fig1" && text("kind") != "fig2") throw ConfigError("kind must be fig1 or fig2");
  if (has("tol") && !(real("tol") >= 0.0)) throw ConfigError("tol must be >= 0");
  if (has("vector")) {
    const long long j = integer("vector");
    if (j < -1 || (j >= 0 && static_cast<std::size_t>(j) >= count("n")))
      throw ConfigError("vector must be -1 or an index in [0, N)");
  }
  if (has("observables")) {
    const auto items = split(text("observables"), ',');
    if (items.empty()) throw ConfigError("observables must not be empty");
    try {
      for (const auto& o : items) Observable::parse(o);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (has("x")) {
    for (const auto& s : split(text("x"), ',')) {
      const auto site = parse_number<long long>("x", s);
      if (site < 1 || static_cast<std::size_t>(site) > count("n")) throw ConfigError("x sites must lie in [1, N]");
    }
  }
  if (has("points") && command_ == "dos" && text("method") == "both" && count("points") % count("bins") != 0)
    throw ConfigError("dos with method=both needs points to be a multiple of bins");
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  feed("command=" + command_ + "\n");
  for (const auto& [k, v] : values_) {
    if (k == "workers" || k == "out" || k == "format") continue;
    feed(k + "=" + v + "\n");
  }
  return h;
}

std::string error_json(const std::string& type, const std::string& message) {
  json e;
  e["error"] = {{"type", type}, {"message", message}};
  return e.dump();
}

namespace {

struct Table {
  std::string header;
  std::vector<std::string> rows;

  void add(std::initializer_list<std::string> cells) {
    std::string row;
    for (const auto& c : cells) {
      if (!row.empty()) row += ',';
      row += c;
    }
    rows.push_back(std::move(row));
  }
};

struct Result {
  Table table;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double stderr = 0.0;
  std::size_t samples = 0;
  std::string estimate_of;
  json diagnostics = json::object();
  std::vector<std::string> warnings;
};

std::string num(double x) { return fmt(x); }
std::string num(std::size_t x) { return std::to_string(x); }

PotentialSpec spec_of(const RunConfig& c) {
  if (c.text("dist") == "uniform") return PotentialSpec::uniform(c.real("lo"), c.real("hi"), c.real("eps"));
  return PotentialSpec::gaussian(c.real("mean"), c.real("std"), c.real("eps"));
}

Executor executor_of(const RunConfig& c) { return Executor{c.count("workers")}; }

std::vector<double> lambda_points(const RunConfig& c) {
  const double lo = c.real("lambda_lo"), hi = c.real("lambda_hi");
  const std::size_t p = c.count("points");
  std::vector<double> xs(p);
  for (std::size_t i = 0; i < p; ++i)
    xs[i] = p == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(p - 1);
  return xs;
}

LyapunovTable table_of(const RunConfig& c, const PotentialSpec& spec, std::uint64_t seed) {
  const auto [a, b] = spec.effective_support();
  return lyapunov_table(spec, a - 2.0, b + 2.0, c.count("table_points"), c.count("table_steps"), c.count("batches"),
                        seed, executor_of(c));
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

Result run_spectrum(const RunConfig& c) {
  Result r;
  const Disorder d = sample_disorder(spec_of(c), c.count("n"), derive_seed(c.seed(), {0}));
  const double tol = c.real("tol");
  const long long j = c.integer("vector");
  if (j >= 0) {
    const auto idx = static_cast<std::size_t>(j);
    const Eigenpair e = eigenvector(d, eigenvalues_by_index(d, idx, idx + 1, tol).front());
    r.table.header = "site,amplitude,log_amplitude";
    for (std::size_t k = 0; k < e.vector.size(); ++k) r.table.add({num(k + 1), num(e.vector[k]), num(e.log_abs[k])});
    r.estimate = e.lambda;
    r.estimate_of = "eigenvalue";
    r.samples = 1;
    r.diagnostics["residual"] = e.residual;
    return r;
  }
  const Spectrum s = eigenvalues_dirichlet(d, tol);
  r.table.header = "index,eigenvalue";
  double sum = 0.0;
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    r.table.add({num(i), num(s.eigenvalues[i])});
    sum += s.eigenvalues[i];
  }
  r.estimate = sum / static_cast<double>(s.eigenvalues.size());
  r.estimate_of = "mean eigenvalue";
  r.samples = s.eigenvalues.size();
  r.warnings = s.warnings;
  return r;
}

Result run_dos(const RunConfig& c) {
  Result r;
  const PotentialSpec spec = spec_of(c);
  const Executor ex = executor_of(c);
  const std::string method = c.text("method");
  const double lo = c.real("lambda_lo"), hi = c.real("lambda_hi");
  if (!(lo < hi)) throw ConfigError("dos needs lambda_lo < lambda_hi");
  r.table.header = "lambda_bin_center,density,method";
  std::optional<DosCurve> counting, invariant;
  if (method != "invariant") {
    counting = dos_counting(spec, c.count("n"), c.count("realizations"), lo, hi, c.count("bins"),
                            derive_seed(c.seed(), {0}), ex);
    for (std::size_t i = 0; i < counting->centers.size(); ++i)
      r.table.add({num(counting->centers[i]), num(counting->density[i]), "counting"});
    r.diagnostics["counting_integral"] = counting->integral();
    append(r.warnings, counting->warnings);
    r.samples += c.count("n") * c.count("realizations");
  }
  if (method != "counting") {
    const std::size_t p = c.count("points");
    std::vector<double> grid(p);
    for (std::size_t i = 0; i < p; ++i) grid[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(p);
    invariant = dos_invariant(spec, grid, c.count("phase_bins"), c.count("steps"), derive_seed(c.seed(), {1}), ex);
    for (std::size_t i = 0; i < p; ++i) r.table.add({num(invariant->centers[i]), num(invariant->density[i]), "invariant"});
    r.diagnostics["invariant_integral"] = invariant->integral();
    append(r.warnings, invariant->warnings);
    r.samples += p * c.count("steps");
  }
  if (counting && invariant) {
    // Interior bins exclude the two end bins of the range.
    const std::size_t bins = counting->density.size();
    const std::size_t group = invariant->density.size() / bins;
    const double peak = *std::max_element(counting->density.begin(), counting->density.end());
    double worst = 0.0;
    for (std::size_t b = 1; b + 1 < bins; ++b) {
      double m = 0.0;
      for (std::size_t s = 0; s < group; ++s) m += invariant->density[b * group + s];
      m /= static_cast<double>(group);
      worst = std::max(worst, std::abs(m - counting->density[b]));
    }
    r.estimate = peak > 0.0 ? worst / peak : 0.0;
    r.estimate_of = "max interior discrepancy / peak";
  } else {
    r.estimate = counting ? counting->integral() : invariant->integral();
    r.estimate_of = "integral";
  }
  return r;
}

Result run_lyapunov(const RunConfig& c) {
  Result r;
  const PotentialSpec spec = spec_of(c);
  const auto lambdas = lambda_points(c);
  const std::size_t steps = c.count("steps"), batches = c.count("batches");
  const std::uint64_t seed = c.seed();
  const auto est = parallel_map(executor_of(c), lambdas.size(), [&](std::size_t i) {
    return lyapunov(spec, lambdas[i], steps, batches, derive_seed(seed, {i}));
  });
  r.table.header = "lambda,gamma,gamma_se,sigma2,sigma2_se";
  for (const auto& e : est) {
    r.table.add({num(e.lambda), num(e.gamma), num(e.gamma_se), num(e.sigma2), num(e.sigma2_se)});
    append(r.warnings, e.warnings);
  }
  r.estimate = est.front().gamma;
  r.stderr = est.front().gamma_se;
  r.estimate_of = "gamma at the first lambda";
  r.samples = steps * lambdas.size();
  r.diagnostics["sigma2"] = est.front().sigma2;
  r.diagnostics["sigma2_se"] = est.front().sigma2_se;
  return r;
}

Result run_invariant(const RunConfig& c) {
  Result r;
  const InvariantMeasure m = invariant_measure(spec_of(c), c.real("lambda"), c.count("phase_bins"), c.count("burnin"),
                                               c.count("steps"), derive_seed(c.seed(), {0}));
  r.table.header = "bin_center,histogram,operator";
  const auto hp = m.histogram.probabilities(), op = m.op.probabilities();
  const double w = m.histogram.width();
  for (std::size_t i = 0; i < hp.size(); ++i) r.table.add({num(m.histogram.center(i)), num(hp[i] / w), num(op[i] / w)});
  r.estimate = m.tv;
  r.estimate_of = "total variation between histogram and operator fixed point";
  r.samples = c.count("steps");
  r.warnings = m.warnings;
  return r;
}

Result run_mixing(const RunConfig& c) {
  Result r;
  const MixingEstimate m =
      mixing_estimate(spec_of(c), c.real("lambda"), c.count("max_lag"), c.count("steps"), derive_seed(c.seed(), {0}));
  r.table.header = "lag,corr_sin2,corr_cos2,corr_cos4";
  for (std::size_t l = 0; l < m.corr.size(); ++l)
    r.table.add({num(l), num(m.corr[l][0]), num(m.corr[l][1]), num(m.corr[l][2])});
  r.estimate = m.kappa[0];
  r.estimate_of = "kappa of the sin2 autocorrelation fit";
  r.samples = c.count("steps");
  for (std::size_t q = 0; q < 3; ++q)
    r.diagnostics[kMixingFunctions[q]] = {{"kappa", m.kappa[q]}, {"r2", m.r2[q]}, {"fit_lags", m.fit_lags[q]}};
  r.diagnostics["kappa_max"] = m.kappa_max;
  r.warnings = m.warnings;
  return r;
}

Result run_fb_verify(const RunConfig& c) {
  Result r;
  const PotentialSpec spec = spec_of(c);
  const Executor ex = executor_of(c);
  const std::size_t n = c.count("n");
  std::vector<Observable> obs;
  for (const auto& s : split(c.text("observables"), ',')) obs.push_back(Observable::parse(s));
  const auto lhs = lhs_estimate(obs, spec, n, c.count("realizations"), derive_seed(c.seed(), {0}), ex);
  RhsOptions o;
  o.cells = c.count("cells");
  o.pairs = c.count("pairs");
  o.replicas = c.count("replicas");
  const double h = c.real("bandwidth");
  o.bandwidths = {h};
  o.seed = derive_seed(c.seed(), {1});
  const RhsResult rhs = rhs_estimate(obs, spec, n, o, ex);
  // h and h/2 evaluated on one shared run with 4x the pairs.
  std::optional<RhsResult> bias;
  if (c.integer("bias_check")) {
    RhsOptions b = o;
    b.pairs = 4 * o.pairs;
    b.bandwidths = {h, 0.5 * h};
    b.seed = derive_seed(c.seed(), {2});
    bias = rhs_estimate(obs, spec, n, b, ex);
  }
  r.table.header = "observable,lhs,lhs_se,rhs,rhs_se,bandwidth";
  for (std::size_t i = 0; i < obs.size(); ++i)
    r.table.add({obs[i].name(), num(lhs[i].value), num(lhs[i].stderr), num(rhs.estimates[0][i].value),
                 num(rhs.estimates[0][i].stderr), num(h)});
  if (bias)
    for (std::size_t i = 0; i < obs.size(); ++i)
      r.table.add({obs[i].name(), num(lhs[i].value), num(lhs[i].stderr), num(bias->estimates[1][i].value),
                   num(bias->estimates[1][i].stderr), num(0.5 * h)});
  json per = json::array();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Estimate& e = rhs.estimates[0][i];
    const double se = std::hypot(lhs[i].stderr, e.stderr);
    json item{{"observable", obs[i].name()},
              {"z", se > 0.0 ? (e.value - lhs[i].value) / se : 0.0},
              {"relative_gap", lhs[i].value != 0.0 ? std::abs(e.value - lhs[i].value) / std::abs(lhs[i].value) : 0.0}};
    if (bias) {
      const double shift = bias->estimates[1][i].value - bias->estimates[0][i].value;
      item["bias_shift"] = shift;
      item["bias_shift_se"] = e.stderr > 0.0 ? std::abs(shift) / e.stderr : 0.0;
    }
    per.push_back(item);
  }
  r.diagnostics["observables"] = per;
  r.estimate = rhs.estimates[0][0].value;
  r.stderr = rhs.estimates[0][0].stderr;
  r.estimate_of = "forward-backward side for the first observable";
  r.samples = rhs.fb_samples;
  r.warnings = rhs.warnings;
  if (bias) append(r.warnings, bias->warnings);
  return r;
}

Result run_dtheta(const RunConfig& c) {
  Result r;
  const PotentialSpec spec = spec_of(c);
  const std::size_t n = c.count("n");
  const double lo = c.real("lambda_lo"), hi = c.real("lambda_hi");
  const std::uint64_t seed = c.seed();
  struct Row {
    double lambda, error;
  };
  const auto rows = parallel_map(executor_of(c), c.count("realizations"), [&](std::size_t i) {
    const Disorder d = sample_disorder(spec, n, derive_seed(seed, {i, 0}));
    Rng rng(derive_seed(seed, {i, 1}));
    const double lambda = std::uniform_real_distribution<double>(lo, hi)(rng);
    return Row{lambda, dtheta_identity_check(d, lambda).relative_error};
  });
  r.table.header = "instance,lambda,relative_error";
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r.table.add({num(i), num(rows[i].lambda), num(rows[i].error)});
    worst = std::max(worst, rows[i].error);
  }
  r.estimate = worst;
  r.estimate_of = "max relative error";
  r.samples = rows.size();
  return r;
}

void tails_table(Result& r, const TailsResult& t) {
  r.table.header = "sample_id,s,q,fluct";
  for (const auto& s : t.samples)
    for (std::size_t i = 0; i < t.s.size(); ++i) r.table.add({num(s.id), num(t.s[i]), num(s.q[i]), num(s.fluct[i])});
  r.samples = t.samples.size();
  append(r.warnings, t.warnings);
}

json tail_json(const TailDiagnostics& d, std::size_t skipped) {
  return {{"ks_center", d.ks_center},       {"slope_error_pooled", d.slope_error_pooled},
          {"slope_error_max", d.slope_error_max}, {"slope_bins", d.slope_bins},
          {"mean_slope", d.mean_slope},     {"mean_gamma", d.mean_gamma},
          {"fluct_skew", d.fluct_skew},     {"fluct_kurt", d.fluct_kurt},
          {"fluct_var", d.fluct_var},       {"skipped", skipped}};
}

Result run_tails(const RunConfig& c) {
  Result r;
  const PotentialSpec spec = spec_of(c);
  const LyapunovTable table = table_of(c, spec, derive_seed(c.seed(), {0}));
  const TailsResult t = tails_experiment(spec, c.count("n"), c.count("realizations"), unit_grid(c.count("s_points")),
                                         table, derive_seed(c.seed(), {1}), executor_of(c));
  tails_table(r, t);
  const TailDiagnostics d = tail_diagnostics(t);
  r.diagnostics = tail_json(d, t.skipped);
  r.estimate = d.ks_center;
  r.estimate_of = "KS distance of centers from uniform";
  return r;
}

Result run_temperature(const RunConfig& c) {
  Result r;
  const PotentialSpec spec = spec_of(c);
  const std::size_t n = c.count("n");
  std::vector<std::size_t> xs;
  for (const auto& s : split(c.text("x"), ',')) xs.push_back(static_cast<std::size_t>(std::stoll(s)));
  if (xs.empty()) {
    const double root = std::sqrt(static_cast<double>(n));
    for (double k : {-1.0, 0.0, 1.0})
      xs.push_back(static_cast<std::size_t>(std::clamp(std::lround(0.5 * static_cast<double>(n) + k * root), 1L,
                                                       static_cast<long>(n))));
  }
  const LyapunovTable table = table_of(c, spec, derive_seed(c.seed(), {0}));
  const double t0 = c.real("t0"), tn = c.real("tn");
  const TemperatureResult t =
      temperature_profile(spec, n, t0, tn, c.count("realizations"), xs, table, derive_seed(c.seed(), {1}), executor_of(c));
  r.table.header = "x,measured,stderr,predicted";
  double worst = 0.0;
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    r.table.add({num(t.x[i]), num(t.measured[i]), num(t.stderr[i]), num(t.predicted[i])});
    worst = std::max(worst, std::abs(t.measured[i] - t.predicted[i]));
  }
  const double span = std::abs(tn - t0);
  r.estimate = span > 0.0 ? worst / span : worst;
  r.estimate_of = span > 0.0 ? "max |measured - predicted| / |TN - T0|" : "max |measured - predicted|";
  r.samples = t.realizations;
  return r;
}

Result run_critical(const RunConfig& c) {
  Result r;
  const std::size_t n = c.count("n");
  const CriticalResult cr = critical_preset(n, spec_of(c), c.count("realizations"), unit_grid(c.count("s_points")),
                                            derive_seed(c.seed(), {0}), executor_of(c));
  tails_table(r, cr.tails);
  r.diagnostics = tail_json(tail_diagnostics(cr.tails), cr.tails.skipped);
  r.diagnostics["scaled_spec"] = cr.spec.describe();
  r.estimate = cr.mean_slope_times_n;
  r.estimate_of = "mean tent slope times N";
  return r;
}

Result run_periodic(const RunConfig& c) {
  Result r;
  const std::size_t n = c.count("n");
  const Disorder d = sample_disorder(spec_of(c), n, derive_seed(c.seed(), {0}));
  const PeriodicSpectrum ps = eigenvalues_periodic(d, c.count("grid_factor") * n, c.real("tol"));
  r.table.header = "index,eigenvalue";
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < ps.roots.size(); ++i) {
    r.table.add({num(i), num(ps.roots[i])});
    degenerate += ps.degenerate[i] ? 1 : 0;
  }
  r.estimate = static_cast<double>(ps.roots.size());
  r.estimate_of = "located trace roots";
  r.samples = ps.roots.size();
  r.diagnostics["degenerate"] = degenerate;
  r.warnings = ps.warnings;
  return r;
}

Result run_figure(const RunConfig& c) {
  Result r;
  const FigureKind kind = c.text("kind") == "fig1" ? FigureKind::fig1 : FigureKind::fig2;
  const FigureData f = figure_data(kind, spec_of(c), c.count("n"), c.seed(), c.count("grid_factor"));
  r.table.header = "n,log_norm,fit";
  for (std::size_t i = 0; i < f.log_norm.size(); ++i) r.table.add({num(i), num(f.log_norm[i]), num(f.fit[i])});
  r.estimate = f.gamma_fit;
  r.estimate_of = "fitted tent slope gamma";
  r.samples = f.log_norm.size();
  r.diagnostics = {{"lambda", f.lambda},         {"center", f.center},
                   {"intercept", f.intercept},   {"r2", f.r2},
                   {"gamma_lyapunov", f.gamma_lyapunov}, {"spread", f.spread}};
  r.warnings = f.warnings;
  return r;
}

Result dispatch(const RunConfig& c) {
  const std::string& cmd = c.command();
  if (cmd == "spectrum") return run_spectrum(c);
  if (cmd == "dos") return run_dos(c);
  if (cmd == "lyapunov") return run_lyapunov(c);
  if (cmd == "invariant-measure") return run_invariant(c);
  if (cmd == "mixing") return run_mixing(c);
  if (cmd == "fb-verify") return run_fb_verify(c);
  if (cmd == "dtheta-check") return run_dtheta(c);
  if (cmd == "tails") return run_tails(c);
  if (cmd == "temperature") return run_temperature(c);
  if (cmd == "critical") return run_critical(c);
  if (cmd == "periodic") return run_periodic(c);
  if (cmd == "figure") return run_figure(c);
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

json params_json(const RunConfig& c) {
  json p = json::object();
  p["command"] = c.command();
  for (const auto& [k, v] : c.values()) {
    if (k == "workers" || k == "out" || k == "format") continue;
    const KeyInfo* info = find_key(k);
    switch (info->type) {
      case KeyType::count:
      case KeyType::integer:
        p[k] = c.integer(k);
        break;
      case KeyType::seed:
        p[k] = c.seed();
        break;
      case KeyType::real:
        p[k] = c.real(k);
        break;
      case KeyType::text:
        p[k] = v;
        break;
    }
  }
  return p;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

RunOutput execute(const RunConfig& config) {
  config.validate();
  Result r = dispatch(config);
  RunOutput out;
  if (config.text("format") == "csv") {
    std::string body = r.table.header + "\n";
    for (const auto& row : r.table.rows) body += row + "\n";
    body += "# seed=" + std::to_string(config.seed()) + " config_hash=" + hex(config.hash()) + "\n";
    out.body = std::move(body);
  } else {
    json j;
    j["estimate"] = r.estimate;
    j["stderr"] = r.stderr;
    j["n_samples"] = r.samples;
    j["params"] = params_json(config);
    j["warnings"] = r.warnings;
    j["estimate_of"] = r.estimate_of;
    j["diagnostics"] = r.diagnostics;
    j["seed"] = config.seed();
    j["config_hash"] = hex(config.hash());
    out.body = j.dump(2) + "\n";
  }
  std::ostringstream s;
  s << config.command() << ": " << r.estimate_of << " = " << fmt(r.estimate);
  if (r.stderr > 0.0) s << " +- " << fmt(r.stderr);
  s << " (n_samples=" << r.samples << ", warnings=" << r.warnings.size() << ")";
  for (const auto& w : r.warnings) s << "\n  warning: " << w;
  out.summary = s.str();
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunOutput o = execute(config);
    const std::string& path = config.text("out");
    if (path.empty()) {
      out << o.body;
      err << o.summary << "\n";
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
      f << o.body;
      if (!f.flush()) throw std::runtime_error("failed writing '" + path + "'");
      out << o.summary << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    err << error_json("config", e.what()) << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << error_json("invalid_argument", e.what()) << "\n";
    return 2;
  } catch (const SpectrumError& e) {
    err << error_json("spectrum", e.what()) << "\n";
    return 1;
  } catch (const TaskError& e) {
    err << error_json("task", e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_json("runtime", e.what()) << "\n";
    return 1;
  }
}

}  // namespace anderson::cli
