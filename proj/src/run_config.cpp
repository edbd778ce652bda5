#include "flightdist/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <string_view>

namespace flightdist {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& v, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  return x;
}

long long parse_integer(const std::string& v, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t parse_unsigned(const std::string& v, const std::string& where) {
  if (v.empty() || v[0] == '-')
    throw ConfigError(where + ": expected an unsigned integer, got '" + v + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(where + ": expected an unsigned integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = std::min(v.find(',', pos), v.size());
    out.push_back(parse_double(trim(std::string_view(v).substr(pos, comma - pos)), where));
    pos = comma + 1;
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig parse_config_file(std::istream& in, const std::string& name,
                            const RunConfig& base) {
  RunConfig cfg = base;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string val = trim(std::string_view(s).substr(eq + 1));
    if (key == "c1") {
      cfg.c1 = parse_double(val, where);
    } else if (key == "c2") {
      cfg.c2 = parse_double(val, where);
    } else if (key == "lambda1") {
      cfg.lambda1 = parse_double(val, where);
    } else if (key == "lambda2") {
      cfg.lambda2 = parse_double(val, where);
    } else if (key == "t") {
      cfg.t = parse_double(val, where);
    } else if (key == "r") {
      cfg.r_grid = parse_double_list(val, where);
    } else if (key == "grid_n") {
      const long long n = parse_integer(val, where);
      if (n < 0) throw ConfigError(where + ": grid_n must be nonnegative");
      cfg.grid_n = static_cast<int>(std::min<long long>(n, 1 << 30));
    } else if (key == "tol") {
      cfg.tol = parse_double(val, where);
    } else if (key == "mc_n") {
      const std::uint64_t n = parse_unsigned(val, where);
      cfg.mc_n = static_cast<std::size_t>(n);
    } else if (key == "seed") {
      cfg.seed = parse_unsigned(val, where);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(val, where);
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "format") {
      cfg.format = val;
    } else if (key == "threads") {
      const long long n = parse_integer(val, where);
      cfg.threads = static_cast<int>(std::clamp<long long>(n, -(1 << 20), 1 << 20));
    } else if (key == "raw_samples") {
      cfg.raw_samples = parse_bool(val, where);
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* env = std::getenv("FLIGHTDIST_SEED"))
    cfg.seed = parse_unsigned(env, "FLIGHTDIST_SEED");
}

std::string dump_config(const RunConfig& cfg) {
  std::string s;
  s += "c1=" + fmt_double(cfg.c1) + "\n";
  s += "c2=" + fmt_double(cfg.c2) + "\n";
  s += "lambda1=" + fmt_double(cfg.lambda1) + "\n";
  s += "lambda2=" + fmt_double(cfg.lambda2) + "\n";
  s += "t=" + fmt_double(cfg.t) + "\n";
  if (!cfg.r_grid.empty()) {
    s += "r=";
    for (std::size_t i = 0; i < cfg.r_grid.size(); ++i) {
      if (i) s += ",";
      s += fmt_double(cfg.r_grid[i]);
    }
    s += "\n";
  }
  s += "grid_n=" + std::to_string(cfg.grid_n) + "\n";
  s += "tol=" + fmt_double(cfg.tol) + "\n";
  s += "mc_n=" + std::to_string(cfg.mc_n) + "\n";
  s += "seed=" + std::to_string(cfg.seed) + "\n";
  s += "alpha=" + fmt_double(cfg.alpha) + "\n";
  s += "out=" + cfg.out + "\n";
  s += "format=" + cfg.format + "\n";
  s += "threads=" + std::to_string(cfg.threads) + "\n";
  s += std::string("raw_samples=") + (cfg.raw_samples ? "true" : "false") + "\n";
  return s;
}

void finalize_config(RunConfig& cfg, bool mc_required) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive and finite");
  };
  positive(cfg.c1, "c1");
  positive(cfg.c2, "c2");
  positive(cfg.lambda1, "lambda1");
  positive(cfg.lambda2, "lambda2");
  positive(cfg.t, "t");
  // A large tol is allowed through: the validate checks are the mechanism
  // that surfaces a tolerance too loose to certify anything.
  if (!(cfg.tol >= 1e-14) || !std::isfinite(cfg.tol))
    throw ConfigError("tol must be finite and at least 1e-14");
  if (cfg.grid_n < 2 || cfg.grid_n > 2'000'001)
    throw ConfigError("grid_n must lie in [2, 2000001]");
  if (cfg.threads < 1 || cfg.threads > 64)
    throw ConfigError("threads must lie in [1, 64]");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (cfg.format != "csv") throw ConfigError("unsupported format '" + cfg.format + "'");
  const double reach = 1.05 * (cfg.c1 + cfg.c2) * cfg.t;
  std::sort(cfg.r_grid.begin(), cfg.r_grid.end());
  for (double r : cfg.r_grid) {
    if (!std::isfinite(r) || r < 0.0 || r > reach)
      throw ConfigError("r values must lie in [0, 1.05*(c1+c2)*t]");
  }
  if (mc_required && cfg.mc_n < 100)
    throw ConfigError("mc_n must be at least 100 for sampling");
  if (!mc_required && cfg.mc_n != 0 && cfg.mc_n < 100)
    throw ConfigError("mc_n must be 0 (disabled) or at least 100");
}

}  // namespace flightdist
