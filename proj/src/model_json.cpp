#include "srad/model_json.hpp"

#include <set>

namespace srad {

nlohmann::json model_to_json(const ModelSpec& spec) {
  return {
      {"kind", std::string(to_string(spec.kind))},
      {"omega", spec.omega},
      {"Omega", spec.Omega},
      {"g", spec.g},
      {"N", spec.N},
      {"C", spec.C},
      {"kappa", spec.kappa},
      {"boson_cutoff", spec.boson_cutoff},
      {"lambda", spec.lambda},
  };
}

namespace {

template <class T>
void read_field(const nlohmann::json& doc, const char* name, T& out) {
  auto it = doc.find(name);
  if (it == doc.end()) return;
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ValidationError(std::string(name) + ": expected an integer");
    } else {
      if (!it->is_number()) throw ValidationError(std::string(name) + ": expected a number");
    }
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string(name) + ": wrong type");
  }
}

}  // namespace

ModelSpec model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("model: expected an object");
  static const std::set<std::string> known = {"kind", "omega", "Omega", "g", "N",
                                              "C", "kappa", "boson_cutoff", "lambda"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ValidationError("model." + it.key() + ": unknown field");
  auto kind = doc.find("kind");
  if (kind == doc.end()) throw ValidationError("model.kind: missing");
  if (!kind->is_string()) throw ValidationError("model.kind: expected a string");
  ModelSpec spec;
  spec.kind = model_kind_from_string(kind->get<std::string>());
  read_field(doc, "omega", spec.omega);
  read_field(doc, "Omega", spec.Omega);
  read_field(doc, "g", spec.g);
  read_field(doc, "N", spec.N);
  read_field(doc, "C", spec.C);
  read_field(doc, "kappa", spec.kappa);
  read_field(doc, "boson_cutoff", spec.boson_cutoff);
  read_field(doc, "lambda", spec.lambda);
  return spec;
}

}  // namespace srad
