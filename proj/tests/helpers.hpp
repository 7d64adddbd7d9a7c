#pragma once

// Shared test plumbing: model-file loading and tiny builders.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <valnet/valnet.hpp>

namespace testutil {

inline std::string model_path(const std::string& name) {
    return std::string(VALNET_MODELS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline valnet::ModelFile load_model(const std::string& name) {
    return valnet::parse_model(read_file(model_path(name)));
}

inline valnet::Domain dom(std::vector<valnet::Variable> vars) {
    return valnet::Domain(std::move(vars));
}

inline valnet::Valuation val(valnet::Algebra kind, std::vector<valnet::Variable> vars,
                             std::vector<double> values) {
    return valnet::Valuation(kind, valnet::Domain(std::move(vars)), std::move(values));
}

}  // namespace testutil
