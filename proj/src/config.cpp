#include "surflab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace surflab {

namespace {

struct TomlValue {
  enum Kind { Str, Int, Float, Bool, Arr } kind = Str;
  std::string s;
  long long i = 0;
  double f = 0;
  bool b = false;
  std::vector<double> arr;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// strip a # comment, respecting quoted strings
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); i++) {
    char ch = line[i];
    if (in_str && ch == '\\') {
      i++;
      continue;
    }
    if (ch == '"') in_str = !in_str;
    if (ch == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

bool parse_ll(const std::string& t, long long& out) {
  const char* b = t.data();
  const char* e = b + t.size();
  if (b != e && *b == '+') b++;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_d(const std::string& t, double& out) {
  const char* b = t.data();
  const char* e = b + t.size();
  if (b != e && *b == '+') b++;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

TomlValue parse_value(const std::string& key, const std::string& raw) {
  std::string t = trim(raw);
  TomlValue v;
  if (t.empty()) throw ConfigError(key, "missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') throw ConfigError(key, "unterminated string");
    v.kind = TomlValue::Str;
    for (size_t i = 1; i + 1 < t.size(); i++) {
      if (t[i] == '\\' && i + 2 < t.size() && (t[i + 1] == '"' || t[i + 1] == '\\'))
        v.s += t[++i];
      else if (t[i] == '"')
        throw ConfigError(key, "unexpected quote inside string");
      else
        v.s += t[i];
    }
    return v;
  }
  if (t == "true" || t == "false") {
    v.kind = TomlValue::Bool;
    v.b = t == "true";
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']') throw ConfigError(key, "unterminated array");
    v.kind = TomlValue::Arr;
    std::string inner = trim(t.substr(1, t.size() - 2));
    if (inner.empty()) return v;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double x;
      long long n;
      if (parse_ll(item, n))
        v.arr.push_back((double)n);
      else if (parse_d(item, x))
        v.arr.push_back(x);
      else
        throw ConfigError(key, "array element '" + item + "' is not a number");
    }
    return v;
  }
  if (parse_ll(t, v.i)) {
    v.kind = TomlValue::Int;
    return v;
  }
  if (parse_d(t, v.f)) {
    v.kind = TomlValue::Float;
    return v;
  }
  throw ConfigError(key, "cannot parse value '" + t + "'");
}

double as_num(const std::string& key, const TomlValue& v) {
  if (v.kind == TomlValue::Int) return (double)v.i;
  if (v.kind == TomlValue::Float) return v.f;
  throw ConfigError(key, "expected a number");
}

long long as_int(const std::string& key, const TomlValue& v) {
  if (v.kind != TomlValue::Int) throw ConfigError(key, "expected an integer");
  return v.i;
}

std::string as_str(const std::string& key, const TomlValue& v) {
  if (v.kind != TomlValue::Str) throw ConfigError(key, "expected a quoted string");
  return v.s;
}

std::vector<double> as_arr(const std::string& key, const TomlValue& v) {
  if (v.kind != TomlValue::Arr) throw ConfigError(key, "expected an array");
  return v.arr;
}

int as_bounded_int(const std::string& key, const TomlValue& v) {
  long long n = as_int(key, v);
  if (n < -(1LL << 31) || n > (1LL << 31)) throw ConfigError(key, "integer out of range");
  return (int)n;
}

std::string num_str(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  c.model.L.clear();
  bool l_set = false, p_set = false;
  std::string section;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", "line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "potential" && section != "mixture" &&
          section != "sampler" && section != "percolation" && section != "profile" &&
          section != "scaling")
        throw ConfigError(section, "unknown section");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string full = section.empty() ? key : section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(full, "duplicate key");
    TomlValue v = parse_value(full, line.substr(eq + 1));

    if (full == "kind") c.kind = as_str(full, v);
    else if (full == "seed") {
      long long s = as_int(full, v);
      if (s < 0) throw ConfigError(full, "seed must be non-negative");
      c.seed = (uint64_t)s;
    } else if (full == "out") c.out = as_str(full, v);
    else if (full == "model.d") c.model.d = as_bounded_int(full, v);
    else if (full == "model.L") {
      c.model.L.clear();
      for (double x : as_arr(full, v)) {
        if (x != std::floor(x)) throw ConfigError(full, "box radii must be integers");
        c.model.L.push_back((int)x);
      }
      l_set = true;
    } else if (full == "model.boundary") c.model.boundary = as_str(full, v);
    else if (full == "model.j") c.model.j = as_bounded_int(full, v);
    else if (full == "potential.kind") c.potential.kind = as_str(full, v);
    else if (full == "potential.c") c.potential.c = as_num(full, v);
    else if (full == "potential.alpha") c.potential.alpha = as_num(full, v);
    else if (full == "potential.eps") c.potential.eps = as_num(full, v);
    else if (full == "potential.beta") c.potential.beta = as_num(full, v);
    else if (full == "potential.K") c.potential.K = as_num(full, v);
    else if (full == "mixture.kind") c.mixture.kind = as_str(full, v);
    else if (full == "mixture.alpha") c.mixture.alpha = as_num(full, v);
    else if (full == "mixture.eps") c.mixture.eps = as_num(full, v);
    else if (full == "mixture.beta") c.mixture.beta = as_num(full, v);
    else if (full == "mixture.K") c.mixture.K = as_num(full, v);
    else if (full == "mixture.kappa1") c.mixture.kappa1 = as_num(full, v);
    else if (full == "mixture.kappa2") c.mixture.kappa2 = as_num(full, v);
    else if (full == "mixture.w") c.mixture.w = as_num(full, v);
    else if (full == "sampler.algorithm") c.sampler.algorithm = as_str(full, v);
    else if (full == "sampler.sweeps") c.sampler.sweeps = as_int(full, v);
    else if (full == "sampler.burnin") c.sampler.burnin = as_int(full, v);
    else if (full == "sampler.thin") c.sampler.thin = as_bounded_int(full, v);
    else if (full == "sampler.replicas") c.sampler.replicas = as_bounded_int(full, v);
    else if (full == "sampler.step") c.sampler.step = as_num(full, v);
    else if (full == "percolation.p") {
      c.percolation_p = as_arr(full, v);
      p_set = true;
    } else if (full == "profile.cutoff") {
      if (v.kind == TomlValue::Str) {
        c.cutoff_mode = v.s;
        c.cutoff_value = 0;
      } else {
        c.cutoff_mode = "fixed";
        c.cutoff_value = as_num(full, v);
      }
    } else if (full == "scaling.norm") c.norm = as_str(full, v);
    else if (full == "scaling.exponent") c.norm_exponent = as_num(full, v);
    else throw ConfigError(full, "unknown key");
  }
  if (!l_set) c.model.L = {4};
  if (!p_set) c.percolation_p.clear();
  return c;
}

void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> kinds{
      "decompose", "sample", "resistance-profile", "percolate",
      "verify-inequalities", "tails", "max-scaling", "variance-growth"};
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw ConfigError("kind", "unknown experiment kind '" + c.kind + "'");
  if (c.out.empty()) throw ConfigError("out", "output directory must be non-empty");

  const ModelSpec& m = c.model;
  if (m.d < 1 || m.d > 5) throw ConfigError("model.d", "dimension must be in [1, 5]");
  if (m.L.empty()) throw ConfigError("model.L", "at least one box radius required");
  for (size_t i = 0; i < m.L.size(); i++) {
    if (m.L[i] < 1) throw ConfigError("model.L", "box radii must be >= 1");
    if (i > 0 && m.L[i] <= m.L[i - 1])
      throw ConfigError("model.L", "box radii must be strictly increasing");
  }
  if (m.boundary != "wired" && m.boundary != "free-pinned" && m.boundary != "torus")
    throw ConfigError("model.boundary", "must be wired, free-pinned, or torus");
  if (m.j < 1 || m.j > 4) throw ConfigError("model.j", "row order must be in [1, 4]");
  if (m.boundary == "torus" && m.j != 1)
    throw ConfigError("model.j", "torus supports j = 1 only");

  const PotentialSpec& u = c.potential;
  if (u.kind != "none" && u.kind != "quadratic" && u.kind != "splice" && u.kind != "poly" &&
      u.kind != "power-interp")
    throw ConfigError("potential.kind", "unknown potential '" + u.kind + "'");
  if (u.kind == "quadratic" && !(u.c > 0))
    throw ConfigError("potential.c", "must be > 0");
  if (u.kind == "splice") {
    if (!(u.alpha > 0)) throw ConfigError("potential.alpha", "must be > 0");
    if (!(u.eps > 0)) throw ConfigError("potential.eps", "must be > 0");
  }
  if (u.kind == "poly") {
    if (!(u.beta > 0) || u.beta > 2)
      throw ConfigError("potential.beta", "must be in (0, 2]");
    if (!(u.eps > 0)) throw ConfigError("potential.eps", "must be > 0");
  }
  if (u.kind == "power-interp") {
    if (!(u.beta > 0) || !(u.beta < 2))
      throw ConfigError("potential.beta", "must be in (0, 2)");
    if (!(u.K > 0)) throw ConfigError("potential.K", "must be > 0");
  }

  const MixtureSpec& x = c.mixture;
  if (x.kind != "none" && x.kind != "pareto" && x.kind != "two-point" &&
      x.kind != "tilted-stable")
    throw ConfigError("mixture.kind", "unknown mixture '" + x.kind + "'");
  if (x.kind == "pareto") {
    if (!(x.alpha > 0)) throw ConfigError("mixture.alpha", "must be > 0");
    if (!(x.eps > 0)) throw ConfigError("mixture.eps", "must be > 0");
  }
  if (x.kind == "two-point") {
    if (!(x.kappa1 > 0)) throw ConfigError("mixture.kappa1", "must be > 0");
    if (!(x.kappa2 >= x.kappa1)) throw ConfigError("mixture.kappa2", "must be >= kappa1");
    if (!(x.w >= 0 && x.w <= 1)) throw ConfigError("mixture.w", "must be in [0, 1]");
  }
  if (x.kind == "tilted-stable") {
    if (!(x.beta > 0) || !(x.beta < 2))
      throw ConfigError("mixture.beta", "must be in (0, 2)");
    if (!(x.K > 0)) throw ConfigError("mixture.K", "must be > 0");
  }

  const SamplerSpec& s = c.sampler;
  if (s.algorithm != "mixture-exact" && s.algorithm != "splice-metropolis" &&
      s.algorithm != "metropolis" && s.algorithm != "gaussian-exact")
    throw ConfigError("sampler.algorithm", "unknown algorithm '" + s.algorithm + "'");
  if (s.sweeps < 1) throw ConfigError("sampler.sweeps", "must be >= 1");
  if (s.burnin < 0) throw ConfigError("sampler.burnin", "must be >= 0");
  if (s.burnin >= s.sweeps)
    throw ConfigError("sampler.burnin", "must be smaller than sweeps");
  if (s.thin < 1) throw ConfigError("sampler.thin", "must be >= 1");
  if (s.replicas < 1 || s.replicas > 512)
    throw ConfigError("sampler.replicas", "must be in [1, 512]");
  if (!(s.step > 0)) throw ConfigError("sampler.step", "must be > 0");

  for (double p : c.percolation_p)
    if (!(p >= 0 && p <= 1)) throw ConfigError("percolation.p", "must be in [0, 1]");
  if (c.cutoff_mode != "none" && c.cutoff_mode != "auto" && c.cutoff_mode != "fixed")
    throw ConfigError("profile.cutoff", "must be \"none\", \"auto\", or a number");
  if (c.cutoff_mode == "fixed" && !(c.cutoff_value > 0))
    throw ConfigError("profile.cutoff", "must be > 0");
  if (c.norm != "log" && c.norm != "power")
    throw ConfigError("scaling.norm", "must be log or power");
  if (!(c.norm_exponent > 0) || c.norm_exponent > 10)
    throw ConfigError("scaling.exponent", "must be in (0, 10]");

  bool chain_kind = c.kind == "sample" || c.kind == "tails" || c.kind == "max-scaling" ||
                    c.kind == "variance-growth";
  if (chain_kind) {
    if (s.algorithm == "mixture-exact" && x.kind == "none")
      throw ConfigError("mixture.kind", "mixture-exact sampler needs a mixture");
    if (s.algorithm == "splice-metropolis" &&
        (u.kind != "splice" || x.kind != "pareto"))
      throw ConfigError("sampler.algorithm",
                        "splice-metropolis needs potential splice and mixture pareto");
    if (s.algorithm == "metropolis" && u.kind == "none")
      throw ConfigError("potential.kind", "metropolis sampler needs a potential");
  }
  if (c.kind == "decompose") {
    if (u.kind == "none") throw ConfigError("potential.kind", "decompose needs a potential");
    if (x.kind == "none") throw ConfigError("mixture.kind", "decompose needs a mixture");
  }
  if ((c.kind == "sample" || c.kind == "tails" || c.kind == "percolate") &&
      m.L.size() != 1)
    throw ConfigError("model.L", "this experiment uses exactly one box radius");
  if (c.kind == "max-scaling" && m.L.size() < 3)
    throw ConfigError("model.L", "max-scaling needs at least 3 box radii");
  if (c.kind == "variance-growth" && m.L.size() < 4)
    throw ConfigError("model.L", "variance-growth needs at least 4 box radii");
  if (c.kind == "percolate" && c.percolation_p.empty())
    throw ConfigError("percolation.p", "percolate needs a probability list");
  if ((c.kind == "resistance-profile" || c.kind == "percolate") && m.j != 1)
    throw ConfigError("model.j", "this experiment needs j = 1 edge rows");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str());
  validate(c);
  return c;
}

std::string canonical_toml(const ExperimentConfig& c) {
  std::string o;
  o += "kind = " + quote(c.kind) + "\n";
  o += "seed = " + std::to_string(c.seed) + "\n";
  o += "out = " + quote(c.out) + "\n";
  o += "\n[model]\n";
  o += "d = " + std::to_string(c.model.d) + "\n";
  o += "L = [";
  for (size_t i = 0; i < c.model.L.size(); i++)
    o += (i ? ", " : "") + std::to_string(c.model.L[i]);
  o += "]\n";
  o += "boundary = " + quote(c.model.boundary) + "\n";
  o += "j = " + std::to_string(c.model.j) + "\n";
  if (c.potential.kind != "none") {
    o += "\n[potential]\n";
    o += "kind = " + quote(c.potential.kind) + "\n";
    if (c.potential.kind == "quadratic") o += "c = " + num_str(c.potential.c) + "\n";
    if (c.potential.kind == "splice") {
      o += "alpha = " + num_str(c.potential.alpha) + "\n";
      o += "eps = " + num_str(c.potential.eps) + "\n";
    }
    if (c.potential.kind == "poly") {
      o += "beta = " + num_str(c.potential.beta) + "\n";
      o += "eps = " + num_str(c.potential.eps) + "\n";
    }
    if (c.potential.kind == "power-interp") {
      o += "beta = " + num_str(c.potential.beta) + "\n";
      o += "K = " + num_str(c.potential.K) + "\n";
    }
  }
  if (c.mixture.kind != "none") {
    o += "\n[mixture]\n";
    o += "kind = " + quote(c.mixture.kind) + "\n";
    if (c.mixture.kind == "pareto") {
      o += "alpha = " + num_str(c.mixture.alpha) + "\n";
      o += "eps = " + num_str(c.mixture.eps) + "\n";
    }
    if (c.mixture.kind == "two-point") {
      o += "kappa1 = " + num_str(c.mixture.kappa1) + "\n";
      o += "kappa2 = " + num_str(c.mixture.kappa2) + "\n";
      o += "w = " + num_str(c.mixture.w) + "\n";
    }
    if (c.mixture.kind == "tilted-stable") {
      o += "beta = " + num_str(c.mixture.beta) + "\n";
      o += "K = " + num_str(c.mixture.K) + "\n";
    }
  }
  o += "\n[sampler]\n";
  o += "algorithm = " + quote(c.sampler.algorithm) + "\n";
  o += "sweeps = " + std::to_string(c.sampler.sweeps) + "\n";
  o += "burnin = " + std::to_string(c.sampler.burnin) + "\n";
  o += "thin = " + std::to_string(c.sampler.thin) + "\n";
  o += "replicas = " + std::to_string(c.sampler.replicas) + "\n";
  if (c.sampler.algorithm == "metropolis")
    o += "step = " + num_str(c.sampler.step) + "\n";
  if (!c.percolation_p.empty()) {
    o += "\n[percolation]\n";
    o += "p = [";
    for (size_t i = 0; i < c.percolation_p.size(); i++)
      o += (i ? ", " : "") + num_str(c.percolation_p[i]);
    o += "]\n";
  }
  if (c.cutoff_mode != "none") {
    o += "\n[profile]\n";
    o += "cutoff = ";
    o += c.cutoff_mode == "auto" ? quote("auto") : num_str(c.cutoff_value);
    o += "\n";
  }
  if (c.kind == "max-scaling") {
    o += "\n[scaling]\n";
    o += "norm = " + quote(c.norm) + "\n";
    o += "exponent = " + num_str(c.norm_exponent) + "\n";
  }
  return o;
}

std::string config_hash(const ExperimentConfig& c) {
  std::string s = canonical_toml(c);
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return std::string(buf);
}

}  // namespace surflab
