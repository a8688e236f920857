#include "limitspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace limitspec {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!keys.count(key)) throw ConfigError(join(path, key), "unknown field");
}

const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing required field");
  return j.at(key);
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::vector<cplx> complex_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of complex numbers");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_from_json(j[i], at_index(path, i)));
  return out;
}

Json complex_list_json(const std::vector<cplx>& values) {
  Json out = Json::array();
  for (const cplx& v : values) out.push_back(complex_to_json(v));
  return out;
}

}  // namespace

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("", "syntax error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what());
  }
}

cplx complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(path, "expected a complex number [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Potential potential_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  const Json& kind_json = field(j, path, "kind");
  if (!kind_json.is_string()) throw ConfigError(join(path, "kind"), "expected a string");
  const std::string kind = kind_json.get<std::string>();

  try {
    if (kind == "constant") {
      reject_unknown(j, path, {"kind", "value"});
      return Constant{complex_from_json(field(j, path, "value"), join(path, "value"))};
    }
    if (kind == "periodic") {
      reject_unknown(j, path, {"kind", "values"});
      auto values = complex_list(field(j, path, "values"), join(path, "values"));
      if (values.empty()) throw ConfigError(join(path, "values"), "period must be at least 1");
      return make_periodic(std::move(values));
    }
    if (kind == "quasi_periodic" || kind == "slow_osc") {
      if (kind == "quasi_periodic")
        reject_unknown(j, path, {"kind", "amplitude", "alpha", "alpha_num", "alpha_den", "phase"});
      else
        reject_unknown(j, path, {"kind", "amplitude", "alpha", "phase", "drift", "offset"});
      const cplx amp = complex_from_json(field(j, path, "amplitude"), join(path, "amplitude"));
      const double phase = j.contains("phase") ? number(j["phase"], join(path, "phase")) : 0.0;
      if (kind == "quasi_periodic" && (j.contains("alpha_num") || j.contains("alpha_den"))) {
        if (j.contains("alpha")) throw ConfigError(join(path, "alpha"), "give alpha or alpha_num/alpha_den, not both");
        return quasi_periodic_rational(amp, integer(field(j, path, "alpha_num"), join(path, "alpha_num")),
                                       integer(field(j, path, "alpha_den"), join(path, "alpha_den")), phase);
      }
      const double alpha = number(field(j, path, "alpha"), join(path, "alpha"));
      if (kind == "quasi_periodic") return make_quasi_periodic(amp, alpha, phase);
      SlowOscillation s;
      s.base = QuasiPeriodic{amp, alpha, phase - std::floor(phase)};
      if (j.contains("drift")) {
        const std::string d = j["drift"].is_string() ? j["drift"].get<std::string>() : "";
        if (d == "signed_sqrt")
          s.drift = Drift::SignedSqrt;
        else if (d == "log1p")
          s.drift = Drift::Log1p;
        else
          throw ConfigError(join(path, "drift"), "expected \"signed_sqrt\" or \"log1p\"");
      }
      if (j.contains("offset")) s.offset = integer(j["offset"], join(path, "offset"));
      return s;
    }
    if (kind == "pseudo_ergodic") {
      reject_unknown(j, path, {"kind", "alphabet", "seed"});
      auto alphabet = complex_list(field(j, path, "alphabet"), join(path, "alphabet"));
      if (alphabet.empty()) throw ConfigError(join(path, "alphabet"), "alphabet must be nonempty");
      std::uint64_t seed = 0;
      if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError(join(path, "seed"), "expected a non-negative integer");
        seed = j["seed"].get<std::uint64_t>();
      }
      return make_pseudo_ergodic(std::move(alphabet), seed);
    }
    if (kind == "sqrt_parity") {
      reject_unknown(j, path, {"kind", "offset"});
      return SqrtParity{j.contains("offset") ? integer(j["offset"], join(path, "offset")) : 0};
    }
    if (kind == "explicit") {
      reject_unknown(j, path, {"kind", "start", "values", "window", "left", "right"});
      Explicit e;
      e.left_tail = complex_from_json(field(j, path, "left"), join(path, "left"));
      e.right_tail = complex_from_json(field(j, path, "right"), join(path, "right"));
      if (j.contains("window")) {
        // {"<n>": value} with contiguous keys
        if (j.contains("values") || j.contains("start"))
          throw ConfigError(join(path, "window"), "give window or start/values, not both");
        const Json& w = j["window"];
        require_object(w, join(path, "window"));
        std::map<std::int64_t, cplx> entries;
        for (const auto& [key, value] : w.items()) {
          std::int64_t n = 0;
          try {
            std::size_t used = 0;
            n = std::stoll(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
          } catch (const std::exception&) {
            throw ConfigError(join(join(path, "window"), key), "window keys must be integers");
          }
          entries[n] = complex_from_json(value, join(join(path, "window"), key));
        }
        if (!entries.empty()) {
          e.start = entries.begin()->first;
          if (entries.rbegin()->first - e.start + 1 != static_cast<std::int64_t>(entries.size()))
            throw ConfigError(join(path, "window"), "window indices must be contiguous");
          for (const auto& [n, v] : entries) e.values.push_back(v);
        }
      } else {
        e.start = j.contains("start") ? integer(j["start"], join(path, "start")) : 0;
        if (j.contains("values")) e.values = complex_list(j["values"], join(path, "values"));
      }
      return e;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "kind"), "unknown potential kind \"" + kind + "\"");
}

Json potential_to_json(const Potential& p) {
  struct Visitor {
    Json operator()(const Constant& c) const { return {{"kind", "constant"}, {"value", complex_to_json(c.value)}}; }
    Json operator()(const Periodic& per) const {
      return {{"kind", "periodic"}, {"values", complex_list_json(per.values)}};
    }
    Json operator()(const QuasiPeriodic& q) const {
      return {{"kind", "quasi_periodic"},
              {"amplitude", complex_to_json(q.amplitude)},
              {"alpha", q.alpha},
              {"phase", q.phase}};
    }
    Json operator()(const SlowOscillation& s) const {
      return {{"kind", "slow_osc"},
              {"amplitude", complex_to_json(s.base.amplitude)},
              {"alpha", s.base.alpha},
              {"phase", s.base.phase},
              {"drift", s.drift == Drift::SignedSqrt ? "signed_sqrt" : "log1p"},
              {"offset", s.offset}};
    }
    Json operator()(const PseudoErgodic& pe) const {
      return {{"kind", "pseudo_ergodic"}, {"alphabet", complex_list_json(pe.alphabet)}, {"seed", pe.seed}};
    }
    Json operator()(const SqrtParity& s) const { return {{"kind", "sqrt_parity"}, {"offset", s.offset}}; }
    Json operator()(const Explicit& e) const {
      return {{"kind", "explicit"},
              {"start", e.start},
              {"values", complex_list_json(e.values)},
              {"left", complex_to_json(e.left_tail)},
              {"right", complex_to_json(e.right_tail)}};
    }
  };
  return std::visit(Visitor{}, p.data());
}

BandOperator operator_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"diagonals"});
  const Json& diags = field(j, path, "diagonals");
  const std::string dpath = join(path, "diagonals");
  require_object(diags, dpath);
  std::map<std::int64_t, Potential> out;
  for (const auto& [key, value] : diags.items()) {
    std::int64_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoll(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ConfigError(join(dpath, key), "diagonal offsets must be integers");
    }
    if (out.count(k)) throw ConfigError(join(dpath, key), "duplicate diagonal offset");
    out.emplace(k, potential_from_json(value, join(dpath, key)));
  }
  return BandOperator(std::move(out));
}

Json operator_to_json(const BandOperator& a) {
  Json diags = Json::object();
  for (const auto& [k, p] : a.diagonals()) diags[std::to_string(k)] = potential_to_json(p);
  return {{"diagonals", diags}};
}

IntegerSequenceSpec sequence_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"polynomial", "values"});
  auto ints = [&](const char* key) {
    const Json& arr = j[key];
    if (!arr.is_array()) throw ConfigError(join(path, key), "expected an array of integers");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(integer(arr[i], at_index(join(path, key), i)));
    return out;
  };
  try {
    if (j.contains("polynomial") == j.contains("values"))
      throw ConfigError(path, "give exactly one of polynomial or values");
    return j.contains("polynomial") ? IntegerSequenceSpec::polynomial(ints("polynomial"))
                                    : IntegerSequenceSpec::explicit_list(ints("values"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

Grid grid_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"bbox", "nx", "ny"});
  const Json& b = field(j, path, "bbox");
  if (!b.is_array() || b.size() != 4) throw ConfigError(join(path, "bbox"), "expected [re_min, re_max, im_min, im_max]");
  BBox box;
  box.re_min = number(b[0], at_index(join(path, "bbox"), 0));
  box.re_max = number(b[1], at_index(join(path, "bbox"), 1));
  box.im_min = number(b[2], at_index(join(path, "bbox"), 2));
  box.im_max = number(b[3], at_index(join(path, "bbox"), 3));
  const std::int64_t nx = integer(field(j, path, "nx"), join(path, "nx"));
  const std::int64_t ny = integer(field(j, path, "ny"), join(path, "ny"));
  for (auto [v, key] : {std::pair{nx, "nx"}, std::pair{ny, "ny"}})
    if (v < 16 || v > 2048) throw ConfigError(join(path, key), "must lie in [16, 2048]");
  try {
    return Grid(box, static_cast<int>(nx), static_cast<int>(ny));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(join(path, "bbox"), e.what());
  }
}

nlohmann::ordered_json region_to_json(const SpectralRegion& region) {
  using OJson = nlohmann::ordered_json;
  auto cj = [](cplx z) { return OJson::array({z.real(), z.imag()}); };
  OJson components = OJson::array();
  for (const Component& c : region.components) {
    if (const auto* iv = std::get_if<RealInterval>(&c)) {
      components.push_back({{"type", "interval"}, {"a", iv->a}, {"b", iv->b}});
    } else if (const auto* ci = std::get_if<Circle>(&c)) {
      components.push_back({{"type", "circle"}, {"center", cj(ci->center)}, {"radius", ci->radius}});
    } else if (const auto* d = std::get_if<ClosedDisk>(&c)) {
      components.push_back({{"type", "disk"}, {"center", cj(d->center)}, {"radius", d->radius}});
    } else if (const auto* di = std::get_if<DiskIntersection>(&c)) {
      OJson centers = OJson::array();
      for (const cplx& z : di->centers) centers.push_back(cj(z));
      components.push_back({{"type", "open_disk_intersection"}, {"centers", centers}, {"radius", di->radius}});
    }
  }
  const BBox& b = region.grid.bbox;
  OJson out;
  out["bbox"] = {b.re_min, b.re_max, b.im_min, b.im_max};
  out["nx"] = region.grid.nx;
  out["ny"] = region.grid.ny;
  out["mask"] = region.mask;
  out["components"] = std::move(components);
  out["metadata"] = region.metadata;
  return out;
}

SpectralRegion region_from_json(const Json& j) {
  const Json& b = j.at("bbox");
  SpectralRegion region(Grid({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()},
                             j.at("nx").get<int>(), j.at("ny").get<int>()));
  const auto mask = j.at("mask").get<std::vector<std::uint8_t>>();
  if (mask.size() != region.mask.size()) throw std::invalid_argument("mask size does not match the grid");
  region.mask = mask;
  for (const Json& c : j.at("components")) {
    const std::string type = c.at("type").get<std::string>();
    if (type == "interval") {
      region.components.emplace_back(RealInterval{c.at("a").get<double>(), c.at("b").get<double>()});
    } else if (type == "circle" || type == "disk") {
      const cplx center = complex_from_json(c.at("center"), "center");
      const double r = c.at("radius").get<double>();
      if (type == "circle")
        region.components.emplace_back(Circle{center, r});
      else
        region.components.emplace_back(ClosedDisk{center, r});
    } else if (type == "open_disk_intersection") {
      region.components.emplace_back(
          DiskIntersection{complex_list(c.at("centers"), "centers"), c.at("radius").get<double>()});
    } else {
      throw std::invalid_argument("unknown component type " + type);
    }
  }
  if (j.contains("metadata")) region.metadata = nlohmann::ordered_json::parse(j["metadata"].dump());
  return region;
}

std::string region_csv(const SpectralRegion& region) {
  std::string out = "re,im\n";
  char line[64];
  for (std::size_t i = 0; i < region.mask.size(); ++i) {
    if (!region.at(i)) continue;
    const cplx z = region.grid.center(i);
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", z.real(), z.imag());
    out += line;
  }
  return out;
}

std::string region_svg(const SpectralRegion& region) {
  const Grid& g = region.grid;
  const double scale = std::max(1.0, 768.0 / std::max(g.nx, g.ny));
  const double stroke = 1.5 / scale;
  // plane -> cell units, imaginary axis pointing up
  auto px = [&](double re) { return (re - g.bbox.re_min) / g.dx(); };
  auto py = [&](double im) { return g.ny - (im - g.bbox.im_min) / g.dy(); };

  std::ostringstream os;
  os.precision(10);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.nx * scale << "\" height=\"" << g.ny * scale
     << "\" viewBox=\"0 0 " << g.nx << ' ' << g.ny << "\">\n";
  os << "<rect width=\"" << g.nx << "\" height=\"" << g.ny << "\" fill=\"#ffffff\"/>\n";
  if (g.bbox.im_min < 0 && g.bbox.im_max > 0)
    os << "<line x1=\"0\" y1=\"" << py(0) << "\" x2=\"" << g.nx << "\" y2=\"" << py(0)
       << "\" stroke=\"#bbbbbb\" stroke-width=\"" << stroke << "\"/>\n";
  if (g.bbox.re_min < 0 && g.bbox.re_max > 0)
    os << "<line x1=\"" << px(0) << "\" y1=\"0\" x2=\"" << px(0) << "\" y2=\"" << g.ny
       << "\" stroke=\"#bbbbbb\" stroke-width=\"" << stroke << "\"/>\n";

  os << "<g fill=\"#2b5d9b\">\n";
  for (int iy = 0; iy < g.ny; ++iy) {
    const std::size_t row = static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.nx);
    for (int ix = 0; ix < g.nx;) {
      if (!region.at(row + static_cast<std::size_t>(ix))) {
        ++ix;
        continue;
      }
      int end = ix;
      while (end < g.nx && region.at(row + static_cast<std::size_t>(end))) ++end;
      os << "<rect x=\"" << ix << "\" y=\"" << g.ny - 1 - iy << "\" width=\"" << end - ix << "\" height=\"1\"/>\n";
      ix = end;
    }
  }
  os << "</g>\n<g fill=\"none\" stroke=\"#d1495b\" stroke-width=\"" << stroke << "\">\n";
  auto circle = [&](cplx c, double r, const char* extra) {
    os << "<ellipse cx=\"" << px(c.real()) << "\" cy=\"" << py(c.imag()) << "\" rx=\"" << r / g.dx() << "\" ry=\""
       << r / g.dy() << '"' << extra << "/>\n";
  };
  for (const Component& c : region.components) {
    if (const auto* iv = std::get_if<RealInterval>(&c)) {
      os << "<line x1=\"" << px(iv->a) << "\" y1=\"" << py(0) << "\" x2=\"" << px(iv->b) << "\" y2=\"" << py(0)
         << "\"/>\n";
    } else if (const auto* ci = std::get_if<Circle>(&c)) {
      circle(ci->center, ci->radius, "");
    } else if (const auto* d = std::get_if<ClosedDisk>(&c)) {
      circle(d->center, d->radius, "");
    } else if (const auto* di = std::get_if<DiskIntersection>(&c)) {
      for (const cplx& z : di->centers) circle(z, di->radius, " stroke-dasharray=\"2 2\" stroke=\"#edae49\"");
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace limitspec
