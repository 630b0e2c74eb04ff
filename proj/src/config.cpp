#include "czdo/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "czdo/error.hpp"

namespace czdo::config {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Config, path + ": " + what);
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

const json* optional_member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

double number(const json& v, const std::string& path, bool allow_inf) {
  if (v.is_number()) return v.get<double>();
  if (allow_inf && v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(path, allow_inf ? "expected a number or \"inf\"/\"-inf\"" : "expected a finite number");
}

long long integer(const json& v, const std::string& path, long long min_value) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value) fail(path, "must be at least " + std::to_string(min_value));
  return x;
}

Vector vec(const json& v, const std::string& path, Eigen::Index size, bool allow_inf) {
  if (!v.is_array()) fail(path, "expected an array");
  if (size >= 0 && static_cast<Eigen::Index>(v.size()) != size)
    fail(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], index_path(path, i), allow_inf);
  return out;
}

// Row-major flat array.
Matrix mat(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  const Vector flat = vec(v, path, rows * cols, false);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = flat(i * cols + j);
  return out;
}

Box box(const json& v, const std::string& path, Eigen::Index size) {
  const Vector lo = vec(member(v, path, "lower"), join(path, "lower"), size, true);
  const Vector hi = vec(member(v, path, "upper"), join(path, "upper"), size, true);
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (lo(i) > hi(i)) fail(index_path(join(path, "lower"), static_cast<std::size_t>(i)), "exceeds upper bound");
  return Box(lo, hi);
}

json num_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num_json(v(i)));
  return a;
}

json mat_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(num_json(m(i, j)));
  return a;
}

json box_json(const Box& b) { return json{{"lower", vec_json(b.lower)}, {"upper", vec_json(b.upper)}}; }

}  // namespace

CZ DisturbanceSection::step_set() const {
  if (step_cz) return CZ(step_cz->G, step_cz->c, step_cz->A, step_cz->b, step_cz->h);
  return cz::from_box(*step_box);
}

DisturbanceStepModel DisturbanceSection::model() const {
  return DisturbanceStepModel(step_set(), diameter_bound.value_or(-1.0));
}

std::vector<int> ObserverSection::deltas() const {
  if (!delta_list.empty()) return delta_list;
  if (delta) return {*delta};
  return {};
}

PlantModel Config::plant_model() const {
  return PlantModel(plant.phi, plant.gamma, plant.g, plant.xi, observer.tol.rank);
}

sim::Scenario Config::scenario() const {
  if (!disturbance) fail("disturbance", "section required for this command");
  if (!x0_box) fail("x0", "section required for this command");
  sim::Scenario s{plant_model(), disturbance->model(), *x0_box, disturbance->d0_sample_box, {}, 1, {}, 1, 0, {}};
  s.inputs = experiment.inputs;
  s.horizon = experiment.horizon;
  s.deltas = observer.deltas();
  s.runs = experiment.runs;
  s.seed = experiment.seed;
  s.tol = observer.tol;
  return s;
}

Config parse(const json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  Config c;

  const json& pj = member(j, "", "plant");
  const auto n = integer(member(pj, "plant", "n"), "plant.n", 1);
  const auto p = integer(member(pj, "plant", "p"), "plant.p", 0);
  const auto q = integer(member(pj, "plant", "q"), "plant.q", 1);
  const auto l = integer(member(pj, "plant", "l"), "plant.l", 0);
  c.plant.phi = mat(member(pj, "plant", "phi"), "plant.phi", n, n);
  c.plant.gamma = mat(member(pj, "plant", "gamma"), "plant.gamma", n, p);
  c.plant.g = mat(member(pj, "plant", "g"), "plant.g", n, q);
  c.plant.xi = mat(member(pj, "plant", "xi"), "plant.xi", l, n);

  if (const json* dj = optional_member(j, "disturbance")) {
    DisturbanceSection d{std::nullopt, std::nullopt, Box::whole_space(0), std::nullopt};
    const json* sb = optional_member(*dj, "step_box");
    const json* sc = optional_member(*dj, "step_cz");
    if ((sb != nullptr) == (sc != nullptr))
      fail("disturbance", "exactly one of step_box and step_cz is required");
    if (sb) {
      d.step_box = box(*sb, "disturbance.step_box", q);
    } else {
      const std::string path = "disturbance.step_cz";
      StepCz z;
      z.h = vec(member(*sc, path, "h"), path + ".h", -1, true);
      const Eigen::Index ng = z.h.size();
      z.c = vec(member(*sc, path, "c"), path + ".c", q, false);
      z.G = mat(member(*sc, path, "G"), path + ".G", q, ng);
      z.b = vec(member(*sc, path, "b"), path + ".b", -1, false);
      z.A = mat(member(*sc, path, "A"), path + ".A", z.b.size(), ng);
      for (Eigen::Index i = 0; i < ng; ++i)
        if (!(z.h(i) >= 0.0)) fail(index_path(path + ".h", static_cast<std::size_t>(i)), "must be >= 0");
      d.step_cz = std::move(z);
    }
    d.d0_sample_box = box(member(*dj, "disturbance", "d0_sample_box"), "disturbance.d0_sample_box", q);
    if (const json* db = optional_member(*dj, "diameter_bound"))
      d.diameter_bound = number(*db, "disturbance.diameter_bound", false);
    c.disturbance = std::move(d);
  }

  if (const json* xj = optional_member(j, "x0")) c.x0_box = box(member(*xj, "x0", "box"), "x0.box", n);

  if (const json* oj = optional_member(j, "observer")) {
    if (const json* v = optional_member(*oj, "delta"))
      c.observer.delta = static_cast<int>(integer(*v, "observer.delta", 1));
    if (const json* v = optional_member(*oj, "delta_list")) {
      if (!v->is_array()) fail("observer.delta_list", "expected an array");
      for (std::size_t i = 0; i < v->size(); ++i)
        c.observer.delta_list.push_back(static_cast<int>(integer((*v)[i], index_path("observer.delta_list", i), 1)));
    }
    if (const json* t = optional_member(*oj, "tolerances")) {
      auto tol_field = [&](const char* key, double& dst) {
        if (const json* v = optional_member(*t, key)) {
          const std::string path = std::string("observer.tolerances.") + key;
          dst = number(*v, path, false);
          if (!(dst > 0.0)) fail(path, "must be positive");
        }
      };
      tol_field("rank", c.observer.tol.rank);
      tol_field("lp", c.observer.tol.lp);
      tol_field("contain", c.observer.tol.contain);
    }
  }

  if (const json* ej = optional_member(j, "experiment")) {
    if (const json* v = optional_member(*ej, "horizon"))
      c.experiment.horizon = static_cast<int>(integer(*v, "experiment.horizon", 0));
    if (const json* v = optional_member(*ej, "runs"))
      c.experiment.runs = static_cast<int>(integer(*v, "experiment.runs", 1));
    if (const json* v = optional_member(*ej, "seed")) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail("experiment.seed", "expected a non-negative integer");
      c.experiment.seed = v->get<std::uint64_t>();
    }
    if (const json* v = optional_member(*ej, "inputs")) {
      if (v->is_string() && v->get<std::string>() == "zero") {
      } else if (v->is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i)
          c.experiment.inputs.push_back(vec((*v)[i], index_path("experiment.inputs", i), p, false));
        if (static_cast<int>(c.experiment.inputs.size()) < c.experiment.horizon)
          fail("experiment.inputs", "needs at least horizon entries");
      } else {
        fail("experiment.inputs", "expected \"zero\" or an array of input vectors");
      }
    }
  }
  return c;
}

Config parse_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("malformed JSON: ") + e.what());
  }
  return parse(j);
}

Config load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

json to_json(const Config& c) {
  json j;
  j["plant"] = {{"n", c.plant.phi.rows()},   {"p", c.plant.gamma.cols()},  {"q", c.plant.g.cols()},
                {"l", c.plant.xi.rows()},    {"phi", mat_json(c.plant.phi)}, {"gamma", mat_json(c.plant.gamma)},
                {"g", mat_json(c.plant.g)},  {"xi", mat_json(c.plant.xi)}};
  if (c.disturbance) {
    const auto& d = *c.disturbance;
    json dj;
    if (d.step_box) dj["step_box"] = box_json(*d.step_box);
    if (d.step_cz) {
      dj["step_cz"] = {{"G", mat_json(d.step_cz->G)}, {"c", vec_json(d.step_cz->c)},
                       {"A", mat_json(d.step_cz->A)}, {"b", vec_json(d.step_cz->b)},
                       {"h", vec_json(d.step_cz->h)}};
    }
    dj["d0_sample_box"] = box_json(d.d0_sample_box);
    if (d.diameter_bound) dj["diameter_bound"] = *d.diameter_bound;
    j["disturbance"] = dj;
  }
  if (c.x0_box) j["x0"] = {{"box", box_json(*c.x0_box)}};
  json oj;
  if (c.observer.delta) oj["delta"] = *c.observer.delta;
  if (!c.observer.delta_list.empty()) oj["delta_list"] = c.observer.delta_list;
  oj["tolerances"] = {{"rank", c.observer.tol.rank}, {"lp", c.observer.tol.lp}, {"contain", c.observer.tol.contain}};
  j["observer"] = oj;
  json ej = {{"horizon", c.experiment.horizon}, {"runs", c.experiment.runs}, {"seed", c.experiment.seed}};
  if (c.experiment.inputs.empty()) {
    ej["inputs"] = "zero";
  } else {
    json a = json::array();
    for (const auto& u : c.experiment.inputs) a.push_back(vec_json(u));
    ej["inputs"] = a;
  }
  j["experiment"] = ej;
  return j;
}

}  // namespace czdo::config
