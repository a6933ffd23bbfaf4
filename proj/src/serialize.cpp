#include "nagtrace/serialize.hpp"

namespace nagtrace {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j) {
  if (!j.is_number()) throw SchemaError("expected a number");
  return j.get<double>();
}

int integer(const Json& j) {
  if (!j.is_number_integer()) throw SchemaError("expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j) {
  if (!j.is_array()) throw SchemaError("expected an array");
  return j;
}

Json charts_json(const Slice& s) {
  Json charts = Json::array();
  for (const auto& c : s.charts) charts.push_back(c ? to_json(*c) : Json(nullptr));
  return charts;
}

std::vector<std::optional<LinearForm>> charts_from_json(const Json& j, const PolySystem& system) {
  array(j);
  if (static_cast<int>(j.size()) != system.num_groups()) throw SchemaError("chart block needs one entry per group");
  std::vector<std::optional<LinearForm>> charts;
  for (int g = 0; g < system.num_groups(); ++g) {
    if (j[g].is_null()) {
      if (system.groups()[g].homogeneous) throw SchemaError("homogeneous group needs a chart");
      charts.emplace_back();
      continue;
    }
    if (!system.groups()[g].homogeneous) throw SchemaError("affine group cannot carry a chart");
    LinearForm f = form_from_json(j[g], system);
    if (f.group != g) throw SchemaError("chart listed under the wrong group");
    charts.push_back(std::move(f));
  }
  return charts;
}

}  // namespace

Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v[k]));
  return out;
}

Json to_json(const LinearForm& f) {
  Json coeffs = Json::array();
  for (const auto& c : f.coeffs) coeffs.push_back(to_json(c));
  return {{"group", f.group}, {"coeffs", coeffs}, {"constant", to_json(f.constant)}};
}

Json to_json(const Slice& s) {
  Json forms = Json::array();
  for (const auto& group_forms : s.forms) {
    Json g = Json::array();
    for (const auto& f : group_forms) g.push_back(to_json(f));
    forms.push_back(g);
  }
  Json merged = nullptr;
  if (s.merged) merged = {{"first", to_json(s.merged->first)}, {"second", to_json(s.merged->second)}};
  return {{"charts", charts_json(s)}, {"forms", forms}, {"merged", merged}};
}

Json to_json(const WitnessSet& w) {
  Json points = Json::array();
  for (const auto& p : w.points) points.push_back(to_json(p));
  return {{"dims", w.dims()}, {"slice", to_json(w.slice)}, {"points", points}};
}

Json to_json(const WitnessCollection& c) {
  Json sets = Json::object();
  for (const auto& [slot, w] : c.sets) sets[slot_key(slot)] = to_json(w);
  Json chart = c.sets.empty() ? Json::array() : charts_json(c.sets.begin()->second.slice);
  return {{"m", c.m}, {"chart", chart}, {"sets", sets}};
}

Json to_json(const TraceTestResult& r) {
  return {{"complete", r.complete}, {"residual", r.residual}, {"trace", {{"c0", to_json(r.trace.c0)}, {"c1", to_json(r.trace.c1)}}}};
}

Json to_json(const Partition& p) {
  return {{"blocks", p.blocks}, {"sizes", p.block_sizes()}, {"loops_run", p.loops_run},
          {"loops_failed", p.loops_failed}, {"warning", p.warning}};
}

Json to_json(const MultiDegree& md) { return md.values; }

Json to_json(const PairReport& p) {
  Json j = {{"pair", {p.pair.first, p.pair.second}},
            {"merged_count", p.merged_count},
            {"residual", p.residual},
            {"passed", p.passed}};
  if (!p.error.empty()) j["error"] = p.error;
  return j;
}

Json to_json(const MTraceReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) pairs.push_back(to_json(p));
  Json j = {{"complete", r.complete}, {"branch", r.branch}, {"pairs", pairs}};
  if (r.surface) {
    j["surface"] = {{"tag", to_string(r.surface->tag)},
                    {"ranks", {r.surface->ranks.first, r.surface->ranks.second}},
                    {"dimension", r.surface->dimension}};
  }
  if (r.branch == "product") {
    j["projection_residuals"] = r.projection_residuals;
    j["product_equality"] = r.product_equality;
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("complex numbers are [re, im] pairs");
  return {number(j[0]), number(j[1])};
}

CVector vector_from_json(const Json& j, Eigen::Index expected_size) {
  array(j);
  if (expected_size >= 0 && static_cast<Eigen::Index>(j.size()) != expected_size)
    throw SchemaError("vector has " + std::to_string(j.size()) + " entries, expected " + std::to_string(expected_size));
  CVector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[k] = complex_from_json(j[k]);
  return v;
}

LinearForm form_from_json(const Json& j, const PolySystem& system) {
  LinearForm f;
  f.group = integer(field(j, "group"));
  if (f.group < 0 || f.group >= system.num_groups()) throw SchemaError("linear form names an unknown group");
  const Json& coeffs = array(field(j, "coeffs"));
  if (static_cast<int>(coeffs.size()) != system.group_size(f.group))
    throw SchemaError("linear form has the wrong number of coefficients");
  for (const auto& c : coeffs) f.coeffs.push_back(complex_from_json(c));
  f.constant = complex_from_json(field(j, "constant"));
  return f;
}

Slice slice_from_json(const Json& j, const PolySystem& system) {
  Slice s;
  s.charts = charts_from_json(field(j, "charts"), system);
  const Json& forms = array(field(j, "forms"));
  if (static_cast<int>(forms.size()) != system.num_groups()) throw SchemaError("slice needs one form list per group");
  for (int g = 0; g < system.num_groups(); ++g) {
    s.forms.emplace_back();
    for (const auto& f : array(forms[g])) {
      s.forms.back().push_back(form_from_json(f, system));
      if (s.forms.back().back().group != g) throw SchemaError("slice form listed under the wrong group");
    }
  }
  if (j.contains("merged") && !j.at("merged").is_null()) {
    if (system.num_groups() != 2) throw SchemaError("merged forms need two groups");
    s.merged = MergedForm{form_from_json(field(j["merged"], "first"), system),
                          form_from_json(field(j["merged"], "second"), system)};
    if (s.merged->first.group != 0 || s.merged->second.group != 1) throw SchemaError("merged form groups out of order");
  }
  return s;
}

WitnessSet witness_set_from_json(const Json& j, const PolySystem& system) {
  WitnessSet w{system, slice_from_json(field(j, "slice"), system), {}};
  for (const auto& p : array(field(j, "points"))) w.points.push_back(vector_from_json(p, system.num_variables()));
  if (j.contains("dims")) {
    const Json& dims = array(j.at("dims"));
    std::vector<int> d;
    for (const auto& x : dims) d.push_back(integer(x));
    if (d != w.slice.dims()) throw SchemaError("dims do not match the slice");
  }
  return w;
}

WitnessCollection collection_from_json(const Json& j, const PolySystem& system) {
  if (system.num_groups() != 2) throw SchemaError("witness collections need a system with two groups");
  WitnessCollection c{system, integer(field(j, "m")), {}};
  if (c.m < 1) throw SchemaError("m must be positive");
  const auto charts = charts_from_json(field(j, "chart"), system);
  const Json& sets = field(j, "sets");
  if (!sets.is_object()) throw SchemaError("'sets' must be an object");
  for (const auto& [key, value] : sets.items()) {
    Slot slot;
    try {
      slot = parse_slot_key(key);
    } catch (const Error& e) {
      throw SchemaError(e.what());
    }
    if (slot.first + slot.second != c.m) throw SchemaError("slot " + key + " does not sum to m");
    WitnessSet w = witness_set_from_json(value, system);
    if (w.slice.dims() != std::vector<int>{slot.first, slot.second}) throw SchemaError("slot " + key + " has the wrong slice shape");
    if (!Slice{charts, {}, std::nullopt}.approx_equal(Slice{w.slice.charts, {}, std::nullopt}))
      throw SchemaError("slot " + key + " does not use the shared chart");
    c.sets.emplace(slot, std::move(w));
  }
  return c;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace nagtrace
