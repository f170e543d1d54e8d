#include "stabletail/repro/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "stabletail/errors.hpp"

namespace stabletail::repro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }
std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }
std::string at(const std::string& pointer) { return pointer.empty() ? std::string("/") : pointer; }

[[noreturn]] void fail(const std::string& pointer, const std::string& what) { throw ParseError(at(pointer), what); }

const Json& require(const Json& j, const std::string& key, const std::string& pointer) {
  if (!j.is_object()) fail(pointer, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(pointer, "missing field '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& pointer, bool allow_infinite = false) {
  if (j.is_number()) return j.get<double>();
  if (allow_infinite && j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
  }
  fail(pointer, allow_infinite ? "expected a number, \"inf\" or \"-inf\"" : "expected a number");
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& pointer) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, child(pointer, key));
}

bool boolean_or(const Json& j, const std::string& key, bool fallback, const std::string& pointer) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) fail(child(pointer, key), "expected true or false");
  return it->get<bool>();
}

// null entries map to `null_value` (unbounded box faces).
Vector vector_of(const Json& j, const std::string& pointer, double null_value = std::nan("")) {
  if (!j.is_array() || j.empty()) fail(pointer, "expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_null() && !std::isnan(null_value)) {
      v[static_cast<Eigen::Index>(i)] = null_value;
      continue;
    }
    v[static_cast<Eigen::Index>(i)] = number(j[i], child(pointer, i), !std::isnan(null_value));
  }
  return v;
}

BallNorm norm_of(const Json& j, const std::string& pointer) {
  const auto it = j.find("norm");
  if (it == j.end()) return BallNorm::l2;
  if (*it == "l2") return BallNorm::l2;
  if (*it == "linf") return BallNorm::linf;
  fail(child(pointer, "norm"), "expected \"l2\" or \"linf\"");
}

std::string single_key(const Json& j, const std::string& pointer) {
  if (!j.is_object() || j.size() != 1) fail(pointer, "a region node is an object with exactly one key");
  return j.begin().key();
}

template <class Fn>
auto wrap_domain(const std::string& pointer, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const DomainError& e) {
    fail(pointer, e.what());
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isinf(v[i]))
      out.push_back(v[i] > 0 ? "inf" : "-inf");
    else
      out.push_back(v[i]);
  }
  return out;
}

bool capable(const Capabilities& c, Task task, const ScenarioParams& p) {
  const bool conditional = p.method == "conditional";
  switch (task) {
    case Task::L:
      return c.line_clip && (p.variant.tag != VariantTag::dilated && p.variant.tag != VariantTag::eroded
                                 ? true
                                 : c.dilate_erode);
    case Task::bounds:
      return c.line_clip && c.dilate_erode;
    case Task::estimate:
    case Task::probe:
    case Task::slope:
      return !conditional || c.line_clip;
    case Task::reproduce:
      return true;
  }
  return true;
}

std::vector<std::pair<std::string, Json>> region_children(const Json& j, const std::string& pointer) {
  std::vector<std::pair<std::string, Json>> out;
  const std::string key = single_key(j, pointer);
  const Json& body = j.begin().value();
  if (key == "and" || key == "or" || key == "union" || key == "intersection") {
    for (std::size_t i = 0; i < body.size(); ++i) out.emplace_back(child(child(pointer, key), i), body[i]);
  } else if (key == "difference_with_ball") {
    out.emplace_back(child(child(pointer, key), "base"), body.at("base"));
  }
  return out;
}

std::string offending_node(const Json& j, const std::string& pointer, Task task, const ScenarioParams& p) {
  for (const auto& [ptr, sub] : region_children(j, pointer))
    if (!capable(parse_region(sub, ptr).capabilities(), task, p)) return offending_node(sub, ptr, task, p);
  return at(pointer) + " (" + single_key(j, pointer) + ")";
}

}  // namespace

std::string task_name(Task task) {
  switch (task) {
    case Task::L:
      return "L";
    case Task::bounds:
      return "bounds";
    case Task::estimate:
      return "estimate";
    case Task::probe:
      return "probe";
    case Task::slope:
      return "slope";
    case Task::reproduce:
      return "reproduce";
  }
  return "L";
}

Task parse_task(const std::string& name) {
  for (Task t : {Task::L, Task::bounds, Task::estimate, Task::probe, Task::slope, Task::reproduce})
    if (task_name(t) == name) return t;
  throw ParseError("/task", "unknown task '" + name + "'");
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col), what);
  }
}

Json load_json_argument(const std::string& argument) {
  const auto first = argument.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (argument[first] == '{' || argument[first] == '['))
    return parse_json_text(argument, "<inline>");
  std::ifstream in(argument);
  if (!in) throw ParseError(argument, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), argument);
}

StableVectorModel parse_model(const Json& j, const std::string& pointer) {
  if (!j.is_object()) fail(pointer, "model must be an object");
  const double alpha = number(require(j, "alpha", pointer), child(pointer, "alpha"));
  if (!(alpha > 0.0 && alpha < 2.0)) fail(child(pointer, "alpha"), "alpha must lie in (0, 2)");
  const bool has_matrix = j.contains("matrix"), has_measure = j.contains("measure");
  if (has_matrix == has_measure) fail(pointer, "model needs exactly one of 'matrix' or 'measure'");
  if (has_matrix) {
    const Json& rows = j.at("matrix");
    const std::string mp = child(pointer, "matrix");
    if (!rows.is_array() || rows.empty()) fail(mp, "expected a non-empty array of rows");
    const std::size_t n = rows.size();
    std::size_t m = 0;
    Matrix a;
    for (std::size_t r = 0; r < n; ++r) {
      const Vector row = vector_of(rows[r], child(mp, r));
      if (r == 0) {
        m = static_cast<std::size_t>(row.size());
        a.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
      } else if (static_cast<std::size_t>(row.size()) != m) {
        fail(child(mp, r), "rows must have equal length");
      }
      a.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      if (a.col(c).norm() == 0.0) fail(mp, "column " + std::to_string(c) + " is zero");
    return wrap_domain(pointer, [&] { return from_matrix({alpha, a}); });
  }
  const Json& meas = j.at("measure");
  const std::string mp = child(pointer, "measure");
  if (!meas.is_object()) fail(mp, "expected an object");
  const double iso = number_or(meas, "isotropic_mass", 0.0, mp);
  std::vector<AtomPair> atoms;
  int dim = static_cast<int>(number_or(meas, "dim", 0.0, mp));
  if (meas.contains("atoms")) {
    const Json& list = meas.at("atoms");
    const std::string ap = child(mp, "atoms");
    if (!list.is_array()) fail(ap, "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = child(ap, i);
      const Vector dir = vector_of(require(list[i], "dir", p), child(p, "dir"));
      if (std::abs(dir.norm() - 1.0) > 1e-9) fail(child(p, "dir"), "atom direction must have unit norm");
      const double mass = number(require(list[i], "mass", p), child(p, "mass"));
      if (dim == 0) dim = static_cast<int>(dir.size());
      if (dir.size() != dim) fail(child(p, "dir"), "atom directions must share one dimension");
      atoms.push_back({dir, mass});
    }
  }
  if (dim == 0) fail(mp, "dimension unknown: give atoms or 'dim'");
  return wrap_domain(pointer, [&] { return StableVectorModel(alpha, SpectralMeasure(dim, atoms, iso)); });
}

Region parse_region(const Json& j, const std::string& pointer) {
  const std::string key = single_key(j, pointer);
  const Json& b = j.begin().value();
  const std::string p = child(pointer, key);
  return wrap_domain(p, [&]() -> Region {
    if (key == "halfspace") {
      return Region::halfspace(vector_of(require(b, "normal", p), child(p, "normal")),
                               number(require(b, "offset", p), child(p, "offset")), boolean_or(b, "strict", true, p));
    }
    if (key == "box") {
      const Vector lo = vector_of(require(b, "lo", p), child(p, "lo"), -kInf);
      const Vector hi = vector_of(require(b, "hi", p), child(p, "hi"), kInf);
      if (lo.size() != hi.size()) fail(p, "lo and hi differ in length");
      return Region::box(lo, hi, boolean_or(b, "open", true, p));
    }
    if (key == "ball") {
      return Region::ball(vector_of(require(b, "center", p), child(p, "center")),
                          number(require(b, "radius", p), child(p, "radius")), boolean_or(b, "inside", true, p),
                          norm_of(b, p));
    }
    if (key == "cone_arc") {
      return Region::cone_arc_2d(number(require(b, "theta_lo", p), child(p, "theta_lo")),
                                 number(require(b, "theta_hi", p), child(p, "theta_hi")),
                                 number_or(b, "radius", 1.0, p));
    }
    if (key == "power_region") {
      return Region::power_region(number(require(b, "sigma", p), child(p, "sigma")), number_or(b, "scale", 1.0, p));
    }
    if (key == "and" || key == "or" || key == "union" || key == "intersection") {
      if (!b.is_array() || b.empty()) fail(p, "expected a non-empty array of regions");
      std::vector<Region> parts;
      for (std::size_t i = 0; i < b.size(); ++i) parts.push_back(parse_region(b[i], child(p, i)));
      const bool inter = key == "and" || key == "intersection";
      return inter ? Region::intersection_of(std::move(parts)) : Region::union_of(std::move(parts));
    }
    if (key == "difference_with_ball") {
      return Region::difference_with_ball(parse_region(require(b, "base", p), child(p, "base")),
                                          vector_of(require(b, "center", p), child(p, "center")),
                                          number(require(b, "radius", p), child(p, "radius")), norm_of(b, p));
    }
    fail(pointer, "unknown region node '" + key + "'");
  });
}

RegionVariant parse_variant(const Json& j, const std::string& pointer) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "interior") return RegionVariant::interior();
    if (s == "closure") return RegionVariant::closure();
    fail(pointer, "variant must be interior, closure, or {\"dilated\": d} / {\"eroded\": d}");
  }
  if (j.is_object() && j.size() == 1) {
    const std::string key = j.begin().key();
    const double d = number(j.begin().value(), child(pointer, key));
    return wrap_domain(pointer, [&] {
      if (key == "dilated") return RegionVariant::dilated(d);
      if (key == "eroded") return RegionVariant::eroded(d);
      fail(pointer, "unknown variant '" + key + "'");
    });
  }
  fail(pointer, "variant must be a string or a one-key object");
}

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) fail("", "scenario must be an object");
  Scenario s;
  if (j.contains("id")) {
    if (!j.at("id").is_string()) fail("/id", "expected a string");
    s.id = j.at("id").get<std::string>();
  }
  if (j.contains("task")) {
    if (!j.at("task").is_string()) fail("/task", "expected a string");
    s.task = parse_task(j.at("task").get<std::string>());
  }
  if (j.contains("model")) {
    s.model_json = j.at("model");
    s.model = parse_model(s.model_json, "/model");
  }
  if (j.contains("region")) {
    s.region_json = j.at("region");
    s.region = parse_region(s.region_json, "/region");
  }
  if (s.model && s.region && s.model->dim() != s.region->dim())
    fail("/region", "region dimension " + std::to_string(s.region->dim()) + " differs from model dimension " +
                        std::to_string(s.model->dim()));
  if (j.contains("params")) {
    const Json& p = j.at("params");
    const std::string pp = "/params";
    if (!p.is_object()) fail(pp, "expected an object");
    auto& o = s.params;
    o.k = static_cast<int>(number_or(p, "k", o.k, pp));
    if (p.contains("variant")) o.variant = parse_variant(p.at("variant"), child(pp, "variant"));
    if (p.contains("h_grid")) {
      const Vector g = vector_of(p.at("h_grid"), child(pp, "h_grid"));
      o.h_grid.assign(g.data(), g.data() + g.size());
    }
    o.h = number_or(p, "h", o.h, pp);
    o.n = static_cast<std::size_t>(number_or(p, "n", static_cast<double>(o.n), pp));
    o.seed = static_cast<std::uint64_t>(number_or(p, "seed", static_cast<double>(o.seed), pp));
    if (p.contains("method")) {
      const Json& m = p.at("method");
      if (m != "crude" && m != "conditional") fail(child(pp, "method"), "expected \"crude\" or \"conditional\"");
      o.method = m.get<std::string>();
    }
    o.smoothing_index = static_cast<int>(number_or(p, "smoothing_index", o.smoothing_index, pp));
    o.max_partition = boolean_or(p, "max_partition", o.max_partition, pp);
    o.stratified = boolean_or(p, "stratified", o.stratified, pp);
    o.tolerance = number_or(p, "tolerance", o.tolerance, pp);
    o.log_model = boolean_or(p, "log_model", o.log_model, pp);
  }
  return s;
}

Json model_to_json(const StableVectorModel& model) {
  Json atoms = Json::array();
  for (const auto& a : model.measure().atoms()) atoms.push_back({{"dir", vector_json(a.direction)}, {"mass", a.mass}});
  return {{"alpha", model.alpha()},
          {"measure", {{"dim", model.dim()}, {"atoms", atoms}, {"isotropic_mass", model.measure().isotropic_mass()}}}};
}

Json region_to_json(const Region& region) {
  const auto& node = region.node();
  auto norm = [](BallNorm n) { return n == BallNorm::l2 ? "l2" : "linf"; };
  return std::visit(
      [&](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, region_node::Halfspace>) {
          return {{"halfspace", {{"normal", vector_json(d.normal)}, {"offset", d.offset}, {"strict", d.strict}}}};
        } else if constexpr (std::is_same_v<T, region_node::Box>) {
          return {{"box", {{"lo", vector_json(d.lo)}, {"hi", vector_json(d.hi)}, {"open", d.open}}}};
        } else if constexpr (std::is_same_v<T, region_node::Ball>) {
          return {{"ball",
                   {{"center", vector_json(d.center)}, {"radius", d.radius}, {"inside", d.inside}, {"norm", norm(d.norm)}}}};
        } else if constexpr (std::is_same_v<T, region_node::ConeArc2D>) {
          return {{"cone_arc", {{"theta_lo", d.theta_lo}, {"theta_hi", d.theta_hi}, {"radius", d.radius}}}};
        } else if constexpr (std::is_same_v<T, region_node::Power>) {
          return {{"power_region", {{"sigma", d.sigma}, {"scale", d.scale}}}};
        } else if constexpr (std::is_same_v<T, region_node::Union>) {
          Json parts = Json::array();
          for (const auto& r : d.parts) parts.push_back(region_to_json(r));
          return {{"or", parts}};
        } else if constexpr (std::is_same_v<T, region_node::Intersection>) {
          Json parts = Json::array();
          for (const auto& r : d.parts) parts.push_back(region_to_json(r));
          return {{"and", parts}};
        } else {
          return {{"difference_with_ball",
                   {{"base", region_to_json(d.base)},
                    {"center", vector_json(d.center)},
                    {"radius", d.radius},
                    {"norm", norm(d.norm)}}}};
        }
      },
      node.data);
}

void check_capabilities(const Scenario& scenario) {
  if (!scenario.region) return;
  if (capable(scenario.region->capabilities(), scenario.task, scenario.params)) return;
  const Json& j = scenario.region_json.is_null() ? region_to_json(*scenario.region) : scenario.region_json;
  throw CapabilityError("task '" + task_name(scenario.task) + "' is not supported by region node " +
                        offending_node(j, "/region", scenario.task, scenario.params));
}

}  // namespace stabletail::repro
