/*
 * Copyright 2026 The hsbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

/*
 * Monte Carlo experiment driver.
 *
 * Config files are line-oriented `key = value` text ('#' starts a comment):
 *
 *   n       = 300, 500          # one grid axis; every value is a point
 *   k       = 2
 *   alpha   = 0.5, 0.5          # default: uniform
 *   mode    = agnostic          # agnostic | prior
 *   trials  = 20
 *   seed    = 1                 # trial t uses seed + t
 *   blocks  = multinomial       # multinomial | fixed
 *   scaling = exact             # exact: layer values are P, Q = P log n / C(n-1,m-1)
 *                               # raw:   layer values are the probabilities Q
 *   timing  = on                # off writes NA for wall_ms
 *   split_adjust = on           # prior mode: MAP uses Q (1 - θ/log n)
 *   sweep a = 2, 4, 6           # named axis, referenced as $a
 *   layer m=2 within=$a cross=2
 *   layer m=3 default=1 w=2,1:4.5 w=1,2:4.5
 *
 * The grid is the product of the n axis and every sweep axis (declaration
 * order, last axis fastest); points are numbered from 0 in that order.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hsbm/divergence.hpp"
#include "hsbm/io.hpp"
#include "hsbm/model.hpp"
#include "hsbm/pipeline.hpp"

namespace hsbm {

enum class RecoveryMode { kAgnostic, kPrior };
enum class ParameterScaling { kExact, kRaw };

struct LayerSpec {
  int order = 2;
  std::optional<std::string> within;
  std::optional<std::string> cross;
  std::optional<std::string> fallback;                          // default=
  std::vector<std::pair<std::vector<int>, std::string>> entries;  // w=...:value
};

struct ConfigPoint {
  int id = 0;
  std::size_t n = 0;
  std::map<std::string, double> variables;
  TensorSet unscaled;             // P
  ProbabilityTensorSet q;         // Q at this n
};

struct ExperimentConfig {
  std::vector<std::size_t> n;
  int k = 2;
  std::optional<std::vector<double>> alpha;
  RecoveryMode mode = RecoveryMode::kAgnostic;
  int trials = 1;
  std::uint64_t seed = 1;
  BlockSizeMode blocks = BlockSizeMode::kMultinomial;
  ParameterScaling scaling = ParameterScaling::kExact;
  bool timing = true;
  bool split_adjust = true;
  std::vector<std::pair<std::string, std::vector<double>>> sweeps;
  std::vector<LayerSpec> layers;

  CommunityPrior prior() const {
    return alpha ? CommunityPrior(*alpha) : CommunityPrior::uniform(k);
  }

  std::vector<ConfigPoint> points() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace details {

inline std::string trim_ws(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim_ws(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
  }
}

inline bool parse_switch(const std::string& s, std::size_t line) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected on/off, got '" + s + "'");
}

inline double resolve(const std::string& token, const std::map<std::string, double>& vars) {
  if (!token.empty() && token[0] == '$') {
    auto it = vars.find(token.substr(1));
    if (it == vars.end()) throw ConfigError("undefined sweep variable " + token);
    return it->second;
  }
  return parse_number(token, 0);
}

}  // namespace details

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string raw;
  std::size_t line = 0;
  bool have_n = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = details::trim_ws(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto where = [&] { return "line " + std::to_string(line) + ": "; };

    if (text.rfind("layer", 0) == 0 && (text.size() == 5 || text[5] == ' ' || text[5] == '\t')) {
      LayerSpec layer;
      bool have_m = false;
      std::istringstream tokens(text.substr(5));
      std::string tok;
      while (tokens >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + "layer token without '=': " + tok);
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "m") {
          layer.order = static_cast<int>(details::parse_number(value, line));
          have_m = true;
        } else if (key == "within") {
          layer.within = value;
        } else if (key == "cross") {
          layer.cross = value;
        } else if (key == "default") {
          layer.fallback = value;
        } else if (key == "w") {
          const auto colon = value.find(':');
          if (colon == std::string::npos) throw ConfigError(where() + "w= entry needs ':value'");
          std::vector<int> counts;
          for (const auto& c : details::split_list(value.substr(0, colon), ',')) {
            counts.push_back(static_cast<int>(details::parse_number(c, line)));
          }
          layer.entries.emplace_back(std::move(counts), value.substr(colon + 1));
        } else {
          throw ConfigError(where() + "unknown layer key '" + key + "'");
        }
      }
      if (!have_m) throw ConfigError(where() + "layer needs m=");
      if (layer.within.has_value() != layer.cross.has_value()) {
        throw ConfigError(where() + "within= and cross= go together");
      }
      cfg.layers.push_back(std::move(layer));
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = details::trim_ws(text.substr(0, eq));
    const std::string value = details::trim_ws(text.substr(eq + 1));

    if (key.rfind("sweep", 0) == 0) {
      const std::string name = details::trim_ws(key.substr(5));
      if (name.empty()) throw ConfigError(where() + "sweep needs a variable name");
      std::vector<double> grid;
      for (const auto& item : details::split_list(value, ',')) grid.push_back(details::parse_number(item, line));
      if (grid.empty()) throw ConfigError(where() + "empty sweep grid");
      cfg.sweeps.emplace_back(name, std::move(grid));
    } else if (key == "n") {
      for (const auto& item : details::split_list(value, ',')) {
        const double v = details::parse_number(item, line);
        if (v < 1 || v != std::floor(v)) throw ConfigError(where() + "n must be a positive integer");
        cfg.n.push_back(static_cast<std::size_t>(v));
      }
      have_n = true;
    } else if (key == "k") {
      cfg.k = static_cast<int>(details::parse_number(value, line));
    } else if (key == "alpha") {
      std::vector<double> a;
      for (const auto& item : details::split_list(value, ',')) a.push_back(details::parse_number(item, line));
      cfg.alpha = std::move(a);
    } else if (key == "mode") {
      if (value == "agnostic") {
        cfg.mode = RecoveryMode::kAgnostic;
      } else if (value == "prior") {
        cfg.mode = RecoveryMode::kPrior;
      } else {
        throw ConfigError(where() + "mode must be agnostic or prior");
      }
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(details::parse_number(value, line));
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "blocks") {
      if (value == "multinomial") {
        cfg.blocks = BlockSizeMode::kMultinomial;
      } else if (value == "fixed") {
        cfg.blocks = BlockSizeMode::kFixed;
      } else {
        throw ConfigError(where() + "blocks must be multinomial or fixed");
      }
    } else if (key == "scaling") {
      if (value == "exact") {
        cfg.scaling = ParameterScaling::kExact;
      } else if (value == "raw") {
        cfg.scaling = ParameterScaling::kRaw;
      } else {
        throw ConfigError(where() + "scaling must be exact or raw");
      }
    } else if (key == "timing") {
      cfg.timing = details::parse_switch(value, line);
    } else if (key == "split_adjust") {
      cfg.split_adjust = details::parse_switch(value, line);
    } else {
      throw ConfigError(where() + "unknown key '" + key + "'");
    }
  }

  if (!have_n || cfg.n.empty()) throw ConfigError("config needs n");
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.layers.empty()) throw ConfigError("config needs at least one layer");
  if (cfg.alpha) {
    if (static_cast<int>(cfg.alpha->size()) != cfg.k) throw ConfigError("alpha must have k entries");
    double sum = 0.0;
    for (double a : *cfg.alpha) sum += a;
    if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("alpha must sum to 1");
    for (double& a : *cfg.alpha) a /= sum;
  }
  try {
    (void)cfg.prior();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("alpha: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_config(in);
}

inline std::vector<ConfigPoint> ExperimentConfig::points() const {
  std::vector<std::map<std::string, double>> assignments{{}};
  for (const auto& [name, grid] : sweeps) {
    std::vector<std::map<std::string, double>> next;
    for (const auto& base : assignments) {
      for (double v : grid) {
        auto a = base;
        a[name] = v;
        next.push_back(std::move(a));
      }
    }
    assignments = std::move(next);
  }

  std::vector<ConfigPoint> out;
  for (std::size_t n_value : n) {
    for (const auto& vars : assignments) {
      TensorSet values(k);
      for (const auto& layer : layers) {
        const double fill = layer.fallback ? details::resolve(*layer.fallback, vars) : 0.0;
        if (layer.within) {
          values.set_symmetric_layer(layer.order, details::resolve(*layer.within, vars),
                                     details::resolve(*layer.cross, vars));
        } else {
          values.set_layer(layer.order,
                           std::vector<double>(weak_composition_count(layer.order, k), fill));
        }
        for (const auto& [counts, token] : layer.entries) {
          if (static_cast<int>(counts.size()) != k) {
            throw ConfigError("w= entry must have k counts");
          }
          const WeakComposition w(counts);
          if (w.order() != layer.order) throw ConfigError("w= entry does not sum to m");
          values.set(w, details::resolve(token, vars));
        }
      }
      ConfigPoint p;
      p.id = static_cast<int>(out.size());
      p.n = n_value;
      p.variables = vars;
      if (scaling == ParameterScaling::kExact) {
        p.unscaled = values;
        p.q = scale_to_probabilities(values, n_value);
      } else {
        p.q = ProbabilityTensorSet(values);
        p.unscaled = values.scaled([n_value](int m) { return 1.0 / exact_recovery_scale(n_value, m); });
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trials

struct TrialRecord {
  int point_id = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<double> d_gch;
  std::string verdict = "NA";
  std::optional<double> eta_stage1;
  std::optional<double> eta_final;
  int iters = 0;
  std::optional<double> wall_ms;
  std::string error;  // not serialized

  bool exact() const { return eta_final && *eta_final == 0.0; }
  bool operator==(const TrialRecord& o) const {
    return point_id == o.point_id && n == o.n && seed == o.seed && d_gch == o.d_gch &&
           verdict == o.verdict && eta_stage1 == o.eta_stage1 && eta_final == o.eta_final &&
           iters == o.iters && wall_ms == o.wall_ms;
  }
};

// Samples z and H for the point, runs the configured pipeline and scores it
// against the sampled truth. Pipeline failures are recorded, not thrown.
inline TrialRecord run_trial(const ExperimentConfig& cfg, const ConfigPoint& point,
                             std::uint64_t seed) {
  TrialRecord rec;
  rec.point_id = point.id;
  rec.n = point.n;
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const CommunityPrior alpha = cfg.prior();
  if (cfg.k >= 2) {
    const auto gch = gch_global(alpha, point.unscaled, point.n);
    rec.d_gch = gch.global;
    rec.verdict = to_string(classify_regime(gch).regime);
  }
  try {
    const auto z = sample_membership(point.n, alpha, derive_seed(seed, 1), cfg.blocks);
    const auto h = sample_hypergraph(point.n, z, point.q, derive_seed(seed, 2));
    PipelineOptions opts;
    opts.split_adjust = cfg.split_adjust;
    RecoveryReport report = cfg.mode == RecoveryMode::kAgnostic
                                ? agnostic_partition(h, cfg.k, derive_seed(seed, 3), opts)
                                : partition_with_prior(h, cfg.k, point.q, alpha, derive_seed(seed, 3), opts);
    score(report, z);
    rec.eta_stage1 = report.eta_stage1;
    rec.eta_final = report.eta;
    rec.iters = report.iterations;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  if (cfg.timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

struct PointSummary {
  int point_id = 0;
  std::size_t n = 0;
  std::map<std::string, double> variables;
  std::optional<double> d_gch;
  int trials = 0;
  int exact = 0;
  double success_rate = 0.0;  // exact / trials
  double mean_eta_stage1 = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // ordered by (point, trial)
  std::vector<PointSummary> points;
};

inline unsigned worker_count() {
  if (const char* env = std::getenv("HSBM_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs cfg.trials trials per grid point with seeds cfg.seed + t. Trials are
// spread across `workers` threads; the output does not depend on the count.
inline SweepResult phase_sweep(const ExperimentConfig& cfg, unsigned workers = 0) {
  if (workers == 0) workers = worker_count();
  const auto points = cfg.points();
  const std::size_t per_point = static_cast<std::size_t>(cfg.trials);
  SweepResult out;
  out.records.resize(points.size() * per_point);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t job = next++; job < out.records.size(); job = next++) {
      const auto& point = points[job / per_point];
      out.records[job] = run_trial(cfg, point, cfg.seed + job % per_point);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < std::min<std::size_t>(workers, out.records.size()); ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& point : points) {
    PointSummary s;
    s.point_id = point.id;
    s.n = point.n;
    s.variables = point.variables;
    s.trials = cfg.trials;
    int stage1_count = 0;
    for (std::size_t t = 0; t < per_point; ++t) {
      const auto& r = out.records[static_cast<std::size_t>(point.id) * per_point + t];
      s.d_gch = r.d_gch;
      s.exact += r.exact() ? 1 : 0;
      if (r.eta_stage1) {
        s.mean_eta_stage1 += *r.eta_stage1;
        ++stage1_count;
      }
    }
    s.success_rate = static_cast<double>(s.exact) / static_cast<double>(s.trials);
    if (stage1_count > 0) s.mean_eta_stage1 /= stage1_count;
    out.points.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "point_id,n,seed,d_gch,verdict,eta_stage1,eta_final,iters,wall_ms";

namespace details {

inline std::string format_real(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

inline std::optional<double> parse_real(const std::string& s) {
  if (s == "NA") return std::nullopt;
  return std::stod(s);
}

}  // namespace details

inline void emit_csv(const std::vector<TrialRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.point_id << ',' << r.n << ',' << r.seed << ',' << details::format_real(r.d_gch) << ','
       << r.verdict << ',' << details::format_real(r.eta_stage1) << ','
       << details::format_real(r.eta_final) << ',' << r.iters << ','
       << details::format_real(r.wall_ms) << '\n';
  }
  if (!os) throw std::runtime_error("emit_csv: write failed");
}

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  emit_csv(records, out);
  out.close();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

inline std::vector<TrialRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || details::trim_ws(line) != kCsvHeader) {
    throw std::runtime_error("parse_csv: missing or unexpected header");
  }
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (details::trim_ws(line).empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream row(details::trim_ws(line));
    while (std::getline(row, item, ',')) f.push_back(item);
    if (f.size() != 9) throw ParseError("expected 9 fields", lineno);
    try {
      TrialRecord r;
      r.point_id = std::stoi(f[0]);
      r.n = std::stoul(f[1]);
      r.seed = std::stoull(f[2]);
      r.d_gch = details::parse_real(f[3]);
      r.verdict = f[4];
      r.eta_stage1 = details::parse_real(f[5]);
      r.eta_final = details::parse_real(f[6]);
      r.iters = std::stoi(f[7]);
      r.wall_ms = details::parse_real(f[8]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("malformed field", lineno);
    }
  }
  return out;
}

}  // namespace hsbm
