#include "cantorlab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cantorlab/errors.hpp"

namespace cantorlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not an integer: " + v);
  }
  if (used != v.size())
    throw config_error("config key '" + key + "': trailing junk in " + v);
  return x;
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not a number: " + v);
  }
  if (used != v.size())
    throw config_error("config key '" + key + "': trailing junk in " + v);
  return x;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v))
    out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_real(key, item));
  return out;
}

void append_real(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "config line %d: expected key = value", lineno);
      throw config_error(buf);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "config line %d: empty key or value", lineno);
      throw config_error(buf);
    }
    if (!seen.insert(key).second)
      throw config_error("config key given twice: " + key);

    if (key == "d") cfg.d = static_cast<int>(parse_int(key, val));
    else if (key == "alpha") cfg.alpha = parse_real(key, val);
    else if (key == "beta") cfg.beta = parse_real(key, val);
    else if (key == "stages") cfg.stages = static_cast<int>(parse_int(key, val));
    else if (key == "n_schedule") cfg.n_schedule = parse_int_list(key, val);
    else if (key == "s") cfg.s_override = parse_int_list(key, val);
    else if (key == "t") cfg.t_override = parse_int_list(key, val);
    else if (key == "n") cfg.n_override = parse_int_list(key, val);
    else if (key == "c_ratio") cfg.c_ratio = parse_real(key, val);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
    else if (key == "retry_budget") cfg.retry_budget = static_cast<int>(parse_int(key, val));
    else if (key == "r") cfg.r = static_cast<int>(parse_int(key, val));
    else if (key == "p_list") cfg.p_list = parse_real_list(key, val);
    else if (key == "grid_max_factor") cfg.grid_max_factor = parse_real(key, val);
    else if (key == "grid_points_per_decade")
      cfg.grid_points_per_decade = static_cast<int>(parse_int(key, val));
    else if (key == "samples") cfg.samples = static_cast<int>(parse_int(key, val));
    else if (key == "out_dir") cfg.out_dir = val;
    else throw config_error("unknown config key: " + key);
  }

  if (cfg.d < 2) throw config_error("config: d must be >= 2");
  if (cfg.stages < 1) throw config_error("config: stages must be >= 1");
  if (cfg.r < 1) throw config_error("config: r must be >= 1");
  if (cfg.samples < 0) throw config_error("config: samples must be >= 0");
  if (cfg.retry_budget < 1) throw config_error("config: retry_budget must be >= 1");
  const bool any_override = !cfg.s_override.empty() || !cfg.t_override.empty() ||
                            !cfg.n_override.empty();
  const bool all_override = !cfg.s_override.empty() && !cfg.t_override.empty() &&
                            !cfg.n_override.empty();
  if (any_override && !all_override)
    throw config_error("config: give s, t and n together or not at all");
  if (all_override) {
    const auto J = cfg.s_override.size();
    if (cfg.t_override.size() != J || cfg.n_override.size() != J)
      throw config_error("config: s, t, n must have equal length");
    cfg.stages = static_cast<int>(J);
  }
  if (cfg.p_list.empty()) cfg.p_list = {2.0, 4.0, 6.0};
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  out += "d = " + std::to_string(cfg.d) + "\n";
  out += "alpha = "; append_real(out, cfg.alpha); out += "\n";
  out += "beta = "; append_real(out, cfg.beta); out += "\n";
  out += "stages = " + std::to_string(cfg.stages) + "\n";
  const auto int_list = [&](const char* key, const std::vector<int>& v) {
    if (v.empty()) return;
    out += key;
    out += " = ";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(v[i]);
    }
    out += "\n";
  };
  int_list("n_schedule", cfg.n_schedule);
  int_list("s", cfg.s_override);
  int_list("t", cfg.t_override);
  int_list("n", cfg.n_override);
  out += "c_ratio = "; append_real(out, cfg.c_ratio); out += "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "retry_budget = " + std::to_string(cfg.retry_budget) + "\n";
  out += "r = " + std::to_string(cfg.r) + "\n";
  out += "p_list = ";
  for (std::size_t i = 0; i < cfg.p_list.size(); ++i) {
    if (i) out += ",";
    append_real(out, cfg.p_list[i]);
  }
  out += "\n";
  out += "grid_max_factor = "; append_real(out, cfg.grid_max_factor); out += "\n";
  out += "grid_points_per_decade = " + std::to_string(cfg.grid_points_per_decade) + "\n";
  out += "samples = " + std::to_string(cfg.samples) + "\n";
  // out_dir is deliberately omitted: where the artifacts land is not part
  // of the experiment, and the hash must match across output locations.
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ParamSequences make_sequences(const ExperimentConfig& cfg) {
  const Exponents exp = derive_exponents(cfg.d, cfg.alpha, cfg.beta);
  if (!cfg.s_override.empty())
    return ParamSequences(exp, cfg.s_override, cfg.t_override, cfg.n_override);
  std::vector<int> schedule = cfg.n_schedule;
  if (schedule.empty()) {
    schedule.resize(static_cast<std::size_t>(cfg.stages));
    for (int j = 0; j < cfg.stages; ++j)
      schedule[static_cast<std::size_t>(j)] = 8 + 2 * j;
  }
  if (static_cast<int>(schedule.size()) != cfg.stages)
    throw config_error("config: n_schedule length must equal stages");
  return generate_sequences(exp, schedule);
}

}  // namespace cantorlab
