#include "limitspec/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "limitspec/spectra.hpp"

namespace limitspec {

namespace {

const Json kEmpty = Json::object();

class Params {
 public:
  Params(const Json& j, std::string path) : j_(j.is_null() ? kEmpty : j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [key, value] : j_.items())
      if (!ok.count(key)) throw ConfigError(name(key), "unknown field for this command");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& raw(const char* key) const {
    if (!has(key)) throw ConfigError(name(key), "missing required field");
    return j_.at(key);
  }
  std::string name(const std::string& key) const { return path_ + "." + key; }

  double real(const char* key) const {
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError(name(key), "expected a number");
    return v.get<double>();
  }
  double positive(const char* key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw ConfigError(name(key), "must be positive");
    return v;
  }
  std::int64_t integer(const char* key, std::int64_t lo, std::int64_t hi) const {
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(name(key), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi)
      throw ConfigError(name(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
  template <class T>
  void integer_or(const char* key, std::int64_t lo, std::int64_t hi, T& target) const {
    if (has(key)) target = static_cast<T>(integer(key, lo, hi));
  }
  cplx complex(const char* key) const { return complex_from_json(raw(key), name(key)); }
  std::uint64_t seed(const char* key) const {
    if (!has(key)) return 0;
    const Json& v = raw(key);
    if (!v.is_number_unsigned()) throw ConfigError(name(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

 private:
  Json j_;
  std::string path_;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_operator(const JobConfig& c, const char* what) {
  if (!c.op) throw ConfigError("operator", std::string("required by ") + what);
}

}  // namespace

Command parse_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"spectrum", Command::spectrum},         {"essential", Command::essential},
      {"pseudospectrum", Command::pseudospectrum}, {"random-spec", Command::random_spec},
      {"limitops", Command::limitops},         {"verify", Command::verify}};
  for (const auto& [n, c] : table)
    if (name == n) return c;
  throw ConfigError("command",
                    "unknown command \"" + name +
                        "\" (expected spectrum, essential, pseudospectrum, random-spec, limitops or verify)");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::essential: return "essential";
    case Command::pseudospectrum: return "pseudospectrum";
    case Command::random_spec: return "random-spec";
    case Command::limitops: return "limitops";
    case Command::verify: return "verify";
  }
  return "?";
}

JobConfig parse_job_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "command" && key != "operator" && key != "grid" && key != "params" && key != "output")
      throw ConfigError(key, "unknown field");
  if (!doc.contains("command") || !doc["command"].is_string())
    throw ConfigError("command", "missing required string field");

  JobConfig c;
  c.command = parse_command(doc["command"].get<std::string>());
  if (doc.contains("operator")) c.op = operator_from_json(doc["operator"], "operator");

  const bool needs_grid = c.command == Command::spectrum || c.command == Command::essential ||
                          c.command == Command::pseudospectrum || c.command == Command::random_spec;
  if (needs_grid) {
    if (!doc.contains("grid")) throw ConfigError("grid", "missing required field");
    c.grid = grid_from_json(doc["grid"], "grid");
  } else if (doc.contains("grid")) {
    throw ConfigError("grid", "not used by " + command_name(c.command));
  }

  const Params p(doc.contains("params") ? doc["params"] : Json(), "params");
  switch (c.command) {
    case Command::spectrum:
      require_operator(c, "spectrum");
      p.allow({"thetaSamples", "period"});
      p.integer_or("thetaSamples", 1, 1 << 20, c.theta_samples);
      if (p.has("period")) c.period = p.integer("period", 1, 256);
      if (!c.period) {
        try {
          (void)common_period(*c.op);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("operator", e.what());
        }
      }
      break;
    case Command::essential:
      require_operator(c, "essential");
      p.allow({"wordLen", "phaseSamples", "thetaSamples", "maxPeriod", "convergents", "maxMembers", "maxWords"});
      p.integer_or("wordLen", 1, 64, c.essential.word_len);
      p.integer_or("phaseSamples", 1, 1 << 16, c.essential.phase_samples);
      p.integer_or("thetaSamples", 1, 1 << 20, c.essential.theta_samples);
      p.integer_or("maxPeriod", 1, 256, c.essential.max_period);
      p.integer_or("convergents", 1, 64, c.essential.convergents);
      p.integer_or("maxMembers", 1, std::int64_t{1} << 24, c.essential.max_members);
      p.integer_or("maxWords", 1, std::int64_t{1} << 24, c.essential.max_words);
      break;
    case Command::pseudospectrum:
      require_operator(c, "pseudospectrum");
      p.allow({"eps", "n"});
      c.eps = p.positive("eps");
      c.n = p.integer("n", 0, std::int64_t{1} << 40);
      break;
    case Command::random_spec: {
      p.allow({"sigma", "segment", "eps"});
      c.eps = p.positive("eps");
      if (p.has("sigma") == p.has("segment")) throw ConfigError("params.sigma", "give exactly one of sigma or segment");
      if (p.has("sigma")) {
        const Json& s = p.raw("sigma");
        if (!s.is_array() || s.empty()) throw ConfigError("params.sigma", "expected a nonempty array of complex numbers");
        for (std::size_t i = 0; i < s.size(); ++i)
          c.sigma.push_back(complex_from_json(s[i], "params.sigma[" + std::to_string(i) + "]"));
      } else {
        const Params seg(p.raw("segment"), "params.segment");
        seg.allow({"from", "to", "samples"});
        const cplx from = seg.complex("from"), to = seg.complex("to");
        const auto samples = seg.integer("samples", 1, 1 << 16);
        for (std::int64_t i = 0; i < samples; ++i)
          c.sigma.push_back(samples == 1 ? from
                                         : from + (to - from) * (static_cast<double>(i) / static_cast<double>(samples - 1)));
      }
      break;
    }
    case Command::limitops:
      require_operator(c, "limitops");
      p.allow({"h", "window", "steps", "tol", "favardSamples", "favardN", "seed", "wordLen", "phaseSamples"});
      if (p.has("h")) c.h = sequence_from_json(p.raw("h"), "params.h");
      p.integer_or("window", 0, 1 << 16, c.window);
      p.integer_or("steps", 3, 1 << 20, c.steps);
      if (p.has("tol")) {
        c.tol = p.real("tol");
        if (c.tol < 0) throw ConfigError("params.tol", "must be non-negative");
      }
      p.integer_or("favardSamples", 0, 1 << 16, c.favard_samples);
      p.integer_or("favardN", 0, 2048, c.favard_n);
      c.seed = p.seed("seed");
      p.integer_or("wordLen", 1, 64, c.essential.word_len);
      p.integer_or("phaseSamples", 1, 1 << 16, c.essential.phase_samples);
      break;
    case Command::verify: {
      p.allow({"mode", "h", "limit", "m", "steps", "tol", "lambda", "sigma", "tau", "radius"});
      const Json& mode = p.raw("mode");
      if (!mode.is_string() || (mode != "limit_operator" && mode != "randprod"))
        throw ConfigError("params.mode", "expected \"limit_operator\" or \"randprod\"");
      c.verify_randprod = mode == "randprod";
      if (c.verify_randprod) {
        c.lambda = p.complex("lambda");
        c.sigma_value = p.complex("sigma");
        c.tau = p.complex("tau");
        p.integer_or("radius", 1, (kMaxWindow - 1) / 2, c.radius);
        if (!(std::abs(c.lambda - c.sigma_value) <= 1.0 && 1.0 <= std::abs(c.lambda - c.tau)))
          throw ConfigError("params.lambda", "needs |lambda - sigma| <= 1 <= |lambda - tau|");
      } else {
        require_operator(c, "verify");
        c.h = sequence_from_json(p.raw("h"), "params.h");
        c.limit = operator_from_json(p.raw("limit"), "params.limit");
        p.integer_or("m", 0, 256, c.m);
        p.integer_or("steps", 3, 1 << 20, c.steps);
        if (p.has("tol")) {
          c.tol = p.real("tol");
          if (c.tol < 0) throw ConfigError("params.tol", "must be non-negative");
        }
      }
      break;
    }
  }

  const std::string base = command_name(c.command);
  const bool region_output = needs_grid;
  c.json_name = base + ".json";
  c.csv_name = region_output ? base + ".csv" : "";
  c.svg_name = region_output ? base + ".svg" : "";
  if (doc.contains("output")) {
    const Params o(doc["output"], "output");
    o.allow({"json", "csv", "svg"});
    auto name = [&](const char* key, std::string& target) {
      if (!o.has(key)) return;
      const Json& v = o.raw(key);
      if (v.is_null()) {
        target.clear();
      } else if (v.is_string() && !v.get<std::string>().empty() &&
                 std::filesystem::path(v.get<std::string>()).filename() == v.get<std::string>()) {
        target = v.get<std::string>();
      } else {
        throw ConfigError(o.name(key), "expected a plain file name or null");
      }
    };
    name("json", c.json_name);
    if (region_output) {
      name("csv", c.csv_name);
      name("svg", c.svg_name);
    } else if (o.has("csv") || o.has("svg")) {
      throw ConfigError("output", "csv and svg apply to region commands only");
    }
  }
  return c;
}

JobResult compute_job(const JobConfig& c) {
  JobResult result;
  switch (c.command) {
    case Command::spectrum: {
      bool laurent = true;
      for (const auto& [k, p] : c.op->diagonals()) laurent = laurent && p.as<Constant>();
      if (laurent && !c.period)
        result.region = laurent_spectrum(*c.op, c.theta_samples, *c.grid);
      else
        result.region = periodic_spectrum(*c.op, c.period.value_or(common_period(*c.op)), c.theta_samples, *c.grid);
      break;
    }
    case Command::essential:
      result.region = essential_spectrum(*c.op, *c.grid, c.essential);
      break;
    case Command::pseudospectrum:
      result.region = pseudospectrum(*c.op, c.eps, *c.grid, c.n);
      break;
    case Command::random_spec:
      result.region = random_bidiagonal_spectrum(c.sigma, c.eps, *c.grid);
      break;
    case Command::limitops: {
      using OJson = nlohmann::ordered_json;
      const OperatorSpectrumFamily family = operator_spectrum(*c.op);
      OJson families = OJson::array();
      for (const auto& [k, lf] : family.per_diagonal) {
        OJson f{{"offset", k}, {"kind", lf.kind()}};
        if (const auto* fs = std::get_if<FiniteSet>(&lf.family)) {
          OJson members = OJson::array();
          for (const auto& m : fs->members) members.push_back(OJson::parse(potential_to_json(m).dump()));
          f["members"] = members;
        }
        if (const auto* t = std::get_if<TorusFamily>(&lf.family)) f["alpha"] = t->alpha;
        if (const auto* s = std::get_if<FullShift>(&lf.family)) f["alphabetSize"] = s->alphabet.size();
        if (lf.orbit_representatives) f["orbitRepresentatives"] = true;
        families.push_back(std::move(f));
      }
      result.report["coupling"] = family.coupling == Coupling::SharedPhase ? "shared_phase" : "independent";
      result.report["families"] = families;

      const MemberList list = enumerate_members(family, c.essential);
      OJson descriptors = OJson::array();
      for (const auto& m : list.members) descriptors.push_back(m.descriptor);
      result.report["memberCount"] = list.members.size();
      result.report["wordLen"] = list.word_len;
      result.report["wordsTruncated"] = list.words_truncated;
      result.report["members"] = descriptors;

      if (c.h) {
        OJson limits = OJson::array();
        for (const auto& [k, p] : c.op->diagonals()) {
          OJson entry{{"offset", k}};
          const auto r = numeric_limit_along(p, *c.h, c.window, c.steps, c.tol);
          if (const auto* w = std::get_if<LimitWindow>(&r)) {
            OJson values = OJson::array();
            for (const cplx& v : w->values) values.push_back({v.real(), v.imag()});
            entry["converged"] = true;
            entry["radius"] = w->radius;
            entry["values"] = values;
          } else {
            const auto& d = std::get<DivergenceReport>(r);
            entry["converged"] = false;
            entry["maxDiscrepancy"] = d.max_discrepancy;
            entry["windowsCompared"] = d.windows_compared;
          }
          limits.push_back(std::move(entry));
        }
        result.report["limits"] = limits;
      }
      if (c.favard_samples > 0) {
        OJson entries = OJson::array();
        for (const auto& e : favard_report(*c.op, c.favard_samples, c.favard_n, c.seed, c.essential))
          entries.push_back({{"descriptor", e.descriptor}, {"lowerNormEstimate", e.estimate}});
        result.report["favard"] = {{"label", "heuristic: sampled lower-norm estimates, not a certificate"},
                                   {"n", c.favard_n},
                                   {"entries", entries}};
      }
      result.summary = "limitops: " + std::to_string(family.per_diagonal.size()) + " diagonals, " +
                       std::to_string(list.members.size()) + " limit operators";
      break;
    }
    case Command::verify: {
      const VerificationReport r = c.verify_randprod
                                       ? verify_randprod(c.lambda, c.sigma_value, c.tau, c.radius)
                                       : verify_limit_operator(*c.op, *c.h, *c.limit, c.m, c.steps, c.tol);
      result.report["mode"] = c.verify_randprod ? "randprod" : "limit_operator";
      result.report["verdict"] = r.verdict;
      result.report["maxDiscrepancy"] = r.max_discrepancy;
      result.report["windowsCompared"] = r.windows_compared;
      if (c.verify_randprod)
        result.report["bound"] = r.bound;
      else
        result.report["norms"] = r.norms;
      result.exit_code = r.verdict ? kExitOk : kExitVerifyFailed;
      result.summary = std::string("verify: verdict ") + (r.verdict ? "true" : "false") +
                       ", max discrepancy " + format_double(r.max_discrepancy);
      break;
    }
  }
  if (result.region) {
    result.summary = command_name(c.command) + ": " + std::to_string(result.region->count()) + "/" +
                     std::to_string(result.region->mask.size()) + " cells marked, " +
                     std::to_string(result.region->components.size()) + " components";
  }
  return result;
}

JobResult run_job(const JobConfig& c, const std::filesystem::path& out_dir) {
  JobResult result = compute_job(c);
  std::filesystem::create_directories(out_dir);
  if (result.region) {
    if (!c.json_name.empty()) write_file_atomic(out_dir / c.json_name, region_to_json(*result.region).dump() + "\n");
    if (!c.csv_name.empty()) write_file_atomic(out_dir / c.csv_name, region_csv(*result.region));
    if (!c.svg_name.empty()) write_file_atomic(out_dir / c.svg_name, region_svg(*result.region));
  } else if (!c.json_name.empty()) {
    write_file_atomic(out_dir / c.json_name, result.report.dump(2) + "\n");
  }
  return result;
}

int run_cli(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<int> threads, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  JobConfig config;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read config file " + config_path.string());
    std::stringstream text;
    text << in.rdbuf();
    config = parse_job_config(parse_json_text(text.str()));
    if (threads) {
      if (*threads < 1) throw ConfigError("--threads", "must be at least 1");
      set_thread_count(*threads);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const JobResult result = run_job(config, out_dir);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << result.summary << ", " << format_double(seconds) << " s\n";
    return result.exit_code;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace limitspec
