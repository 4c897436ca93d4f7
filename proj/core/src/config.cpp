#include "uosdiff/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "uosdiff/error.hpp"

namespace uosdiff {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

class Reader {
 public:
  explicit Reader(const KeyValueConfig& kv) : kv_(kv) {}

  template <typename T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    auto it = kv_.values().find(key);
    if (it == kv_.values().end()) return;
    out = convert<T>(key, it->second);
  }

  template <typename T>
  std::optional<T> get_optional(const std::string& key) {
    used_.insert(key);
    auto it = kv_.values().find(key);
    if (it == kv_.values().end()) return std::nullopt;
    return convert<T>(key, it->second);
  }

  template <typename T>
  std::vector<T> get_list(const std::string& key) {
    used_.insert(key);
    std::vector<T> out;
    auto it = kv_.values().find(key);
    if (it == kv_.values().end()) return out;
    for (const auto& part : split(it->second, ','))
      if (!part.empty()) out.push_back(convert<T>(key, part));
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : kv_.values())
      if (!used_.count(key)) throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
  }

 private:
  template <typename T>
  static T convert(const std::string& key, const std::string& raw) {
    try {
      std::size_t pos = 0;
      T value{};
      if constexpr (std::is_same_v<T, bool>) {
        if (raw == "true" || raw == "1" || raw == "yes") return true;
        if (raw == "false" || raw == "0" || raw == "no") return false;
        throw std::invalid_argument(raw);
      } else if constexpr (std::is_same_v<T, std::string>) {
        return raw;
      } else if constexpr (std::is_floating_point_v<T>) {
        value = static_cast<T>(std::stod(raw, &pos));
      } else {
        if (!raw.empty() && raw.front() == '-') throw std::invalid_argument(raw);
        value = static_cast<T>(std::stoull(raw, &pos));
        if (pos != raw.size()) {
          // Scientific notation for counts (e.g. 1e6) is accepted when integral.
          const double dv = std::stod(raw, &pos);
          if (dv != std::floor(dv) || dv < 0.0 || dv > 9.0e15) throw std::invalid_argument(raw);
          value = static_cast<T>(dv);
        }
      }
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return value;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad value '" + raw + "' for key '" + key + "'");
    }
  }

  const KeyValueConfig& kv_;
  std::set<std::string> used_;
};

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void KeyValueConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "override must be key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw Error(ErrorKind::ConfigError, "override has an empty key");
  values_[key] = trim(assignment.substr(eq + 1));
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw Error(ErrorKind::InvalidRange, "log_spaced needs 0 < lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::size_t ExperimentConfig::total_samples() const {
  if (n > 0) return n;
  const std::size_t want = n_train > 0 ? n_train : 50000;
  std::size_t total = want;
  while (total - required_n0(m(), static_cast<std::size_t>(k()), total, recovery.c_sc) < want) ++total;
  return total;
}

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  Reader r(kv);
  r.get("name", cfg.name);
  r.get("seed", cfg.seed);
  r.get("d", cfg.target.ambient_dim);
  r.get("M", cfg.target.subspace_count);
  r.get("k", cfg.target.intrinsic_dim);
  r.get("n", cfg.n);
  r.get("N", cfg.n_train);
  r.get("n_eval", cfg.n_eval);
  r.get("replicates", cfg.replicates);
  std::string outputs = cfg.outputs.string();
  r.get("outputs", outputs);
  cfg.outputs = outputs;

  r.get("target.mixture_terms", cfg.target.mixture_terms);
  r.get("target.mean_scale", cfg.target.mean_scale);
  r.get("target.mean_max", cfg.target.mean_max);
  r.get("target.cov_min", cfg.target.cov_min);
  r.get("target.cov_max", cfg.target.cov_max);
  r.get("target.c_p", cfg.target.mass_floor_constant);

  cfg.times = r.get_list<double>("times");
  double t_min = 1e-3, t_max = 1.0;
  std::size_t t_count = 20;
  r.get("times.min", t_min);
  r.get("times.max", t_max);
  r.get("times.count", t_count);
  if (cfg.times.empty()) cfg.times = log_spaced(t_min, t_max, t_count);

  r.get("recovery.C_sc", cfg.recovery.c_sc);
  r.get("recovery.M_max", cfg.recovery.m_max);
  r.get("recovery.k_max", cfg.recovery.k_max);
  r.get("recovery.pool_size", cfg.recovery.options.pool_size);
  r.get("recovery.max_subsets", cfg.recovery.options.max_subsets);

  r.get("estimator.C_R", cfg.estimator.c_r);
  r.get("estimator.thresholding", cfg.estimator.thresholding);
  r.get("estimator.clipping", cfg.estimator.clipping);
  r.get("estimator.tube", cfg.estimator.tube_indicator);

  cfg.sampler.tau = r.get_optional<double>("sampler.tau");
  cfg.sampler.T = r.get_optional<double>("sampler.T");
  r.get("sampler.steps", cfg.sampler.steps);
  std::string grid = "log";
  r.get("sampler.grid", grid);
  if (grid == "log")
    cfg.sampler.grid = GridKind::LogUniform;
  else if (grid == "dyadic")
    cfg.sampler.grid = GridKind::Dyadic;
  else
    throw Error(ErrorKind::ConfigError, "sampler.grid must be 'log' or 'dyadic'");
  r.get("sampler.n_gen", cfg.sampler.n_gen);
  cfg.sampler.n_values = r.get_list<std::size_t>("sampler.n_values");
  r.get("sampler.oracle", cfg.sampler.oracle);
  r.get("sampler.projections", cfg.sampler.projections);

  r.reject_unknown();
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (d() < 1 || k() < 1 || k() > d()) fail("need d >= k >= 1");
  if (m() < 1) fail("need M >= 1");
  if (n_eval < 2) fail("need n_eval >= 2");
  if (replicates < 1) fail("need replicates >= 1");
  if (times.empty()) fail("need at least one time value");
  for (double t : times)
    if (!(t > 0.0)) fail("time values must be positive");
  if (target.mixture_terms < 1) fail("need target.mixture_terms >= 1");
  if (!(estimator.c_r > 0.0)) fail("estimator.C_R must be positive");
  if (sampler.steps < 1) fail("sampler.steps must be >= 1");
  if (sampler.n_gen < 1) fail("sampler.n_gen must be >= 1");
  if (sampler.tau && !(*sampler.tau > 0.0)) fail("sampler.tau must be positive");
  if (sampler.tau && sampler.T && !(*sampler.tau < *sampler.T)) fail("sampler.tau must be below sampler.T");
  for (auto v : sampler.n_values)
    if (v < 4) fail("sampler.n_values entries must be >= 4");
}

}  // namespace uosdiff
