// Runs one built-in operation over container files, as a standalone
// process:
//
//   xprov-oprun <name> <params-json> <input.json>... <output.json>
//
// Reads every input container, applies the operation, writes the result to
// the last path. This is the reference external command: pointing a
// workflow's exec at it turns any built-in into a black box that can only
// be probed by rerunning it.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "xprov/builtins.hpp"
#include "xprov/container_io.hpp"
#include "xprov/error.hpp"

namespace {

xprov::Scalar scalar_from_json(const nlohmann::json& v) {
  if (v.is_null()) return xprov::Scalar::null();
  if (v.is_boolean()) return xprov::Scalar::of(v.get<bool>());
  if (v.is_number_float()) return xprov::Scalar::of(v.get<double>());
  if (v.is_number_integer() || v.is_number_unsigned()) {
    return xprov::Scalar::of(v.get<std::int64_t>());
  }
  if (v.is_string()) return xprov::Scalar::of(v.get<std::string>());
  xprov::fail(xprov::ErrorCode::ParseError,
              "parameter values must be scalars");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 5) {
    std::cerr << "usage: xprov-oprun <name> <params-json> <input.json>..."
                 " <output.json>\n";
    return 2;
  }
  try {
    nlohmann::json params_doc =
        nlohmann::json::parse(std::string(argv[2]), nullptr, false);
    if (!params_doc.is_object()) {
      xprov::fail(xprov::ErrorCode::ParseError,
                  "params must be a JSON object");
    }
    std::vector<std::pair<std::string, xprov::Scalar>> params;
    for (const auto& [key, value] : params_doc.items()) {
      params.emplace_back(key, scalar_from_json(value));
    }
    xprov::OperationSignature op =
        xprov::OperationSignature::make("oprun", argv[1], std::move(params));

    std::vector<xprov::Container> inputs;
    for (int i = 3; i < argc - 1; ++i) {
      inputs.push_back(xprov::load_container_file(argv[i]));
    }
    xprov::Container out = xprov::execute_builtin(op, inputs, "out");
    xprov::save_container_file(out, argv[argc - 1]);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "xprov-oprun: " << e.what() << "\n";
    return 1;
  }
}
