// spec_file.hpp — Network description files (strict JSON)
//
// Document layout (all node labels 1-based):
//   {
//     "nodes":      [ {"energy": 1.0}, ... ],
//     "edges":      [ {"i": 1, "j": 3, "coupling": 1.0}, ... ],
//     "lambda_env": 1.0,
//     "source":     {"mode": "independent"|"correlated",
//                    "targets": [1, 2], "rate": 0.5, "phase": 0.0},
//     "drain":      {"node": 3, "rate": 1.0}
//   }
// Unknown keys anywhere are rejected with an error naming the offending key;
// "phase" is the only optional field (defaults to 0).

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "qsw/network.hpp"

namespace qsw {

struct SpecParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using json = nlohmann::json;

inline void expect_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) {
        throw SpecParseError("network spec: " + ctx + " must be an object");
    }
}

inline void check_keys(const json& obj, const std::string& ctx,
                       std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional = {}) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : required) known = known || item.key() == k;
        for (const char* k : optional) known = known || item.key() == k;
        if (!known) {
            std::string allowed;
            for (const char* k : required) allowed += std::string(allowed.empty() ? "" : ", ") + k;
            for (const char* k : optional) allowed += std::string(", ") + k;
            throw SpecParseError("network spec: unknown key \"" + item.key() + "\" in " + ctx +
                                 " (allowed: " + allowed + ")");
        }
    }
    for (const char* k : required) {
        if (!obj.contains(k)) {
            throw SpecParseError("network spec: missing key \"" + std::string(k) + "\" in " + ctx);
        }
    }
}

inline double get_number(const json& obj, const char* key, const std::string& ctx) {
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw SpecParseError("network spec: \"" + std::string(key) + "\" in " + ctx +
                             " must be a number");
    }
    return v.get<double>();
}

inline int get_int(const json& obj, const char* key, const std::string& ctx) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw SpecParseError("network spec: \"" + std::string(key) + "\" in " + ctx +
                             " must be an integer");
    }
    return v.get<int>();
}

}  // namespace detail

inline NetworkSystem parse_network_json(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecParseError(std::string("network spec: invalid JSON: ") + e.what());
    }
    detail::expect_object(doc, "document root");
    detail::check_keys(doc, "document root", {"nodes", "edges", "lambda_env", "source", "drain"});

    NetworkSystem sys;

    const json& nodes = doc.at("nodes");
    if (!nodes.is_array() || nodes.empty()) {
        throw SpecParseError("network spec: \"nodes\" must be a non-empty array");
    }
    const int n = static_cast<int>(nodes.size());
    sys.network.n_nodes = n;
    sys.network.site_energies.resize(n);
    for (int k = 0; k < n; ++k) {
        const std::string ctx = "nodes[" + std::to_string(k) + "]";
        detail::expect_object(nodes[k], ctx);
        detail::check_keys(nodes[k], ctx, {"energy"});
        sys.network.site_energies(k) = detail::get_number(nodes[k], "energy", ctx);
    }

    sys.network.couplings = Eigen::MatrixXd::Zero(n, n);
    const json& edges = doc.at("edges");
    if (!edges.is_array()) {
        throw SpecParseError("network spec: \"edges\" must be an array");
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::string ctx = "edges[" + std::to_string(e) + "]";
        detail::expect_object(edges[e], ctx);
        detail::check_keys(edges[e], ctx, {"i", "j", "coupling"});
        const int i = detail::get_int(edges[e], "i", ctx);
        const int j = detail::get_int(edges[e], "j", ctx);
        const double coupling = detail::get_number(edges[e], "coupling", ctx);
        if (i < 1 || i > n || j < 1 || j > n) {
            throw SpecParseError("network spec: " + ctx + " node label out of range [1, " +
                                 std::to_string(n) + "]");
        }
        if (i == j) {
            throw SpecParseError("network spec: " + ctx + " must join two distinct nodes");
        }
        if (sys.network.couplings(i - 1, j - 1) != 0.0) {
            throw SpecParseError("network spec: " + ctx + " duplicates an earlier edge");
        }
        sys.network.couplings(i - 1, j - 1) = coupling;
        sys.network.couplings(j - 1, i - 1) = coupling;
    }

    if (!doc.at("lambda_env").is_number()) {
        throw SpecParseError("network spec: \"lambda_env\" must be a number");
    }
    sys.network.env_constant = doc.at("lambda_env").get<double>();

    const json& source = doc.at("source");
    detail::expect_object(source, "source");
    detail::check_keys(source, "source", {"mode", "targets", "rate"}, {"phase"});
    if (!source.at("mode").is_string()) {
        throw SpecParseError("network spec: \"mode\" in source must be a string");
    }
    const std::string mode = source.at("mode").get<std::string>();
    if (mode == "independent") {
        sys.source.mode = SourceMode::Independent;
    } else if (mode == "correlated") {
        sys.source.mode = SourceMode::Correlated;
    } else {
        throw SpecParseError("network spec: \"mode\" in source must be \"independent\" or \"correlated\"");
    }
    const json& targets = source.at("targets");
    if (!targets.is_array() || targets.empty()) {
        throw SpecParseError("network spec: \"targets\" in source must be a non-empty array");
    }
    sys.source.targets.clear();
    for (const json& t : targets) {
        if (!t.is_number_integer()) {
            throw SpecParseError("network spec: \"targets\" in source must contain integers");
        }
        sys.source.targets.push_back(t.get<int>());
    }
    sys.source.rate = detail::get_number(source, "rate", "source");
    sys.source.phase = source.contains("phase") ? detail::get_number(source, "phase", "source") : 0.0;

    const json& drain = doc.at("drain");
    detail::expect_object(drain, "drain");
    detail::check_keys(drain, "drain", {"node", "rate"});
    sys.drain.target = detail::get_int(drain, "node", "drain");
    sys.drain.rate = detail::get_number(drain, "rate", "drain");

    try {
        sys.network.validate();
        sys.source.validate(n);
        sys.drain.validate(n);
    } catch (const std::invalid_argument& e) {
        throw SpecParseError(std::string("network spec: ") + e.what());
    }
    return sys;
}

inline NetworkSystem load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SpecParseError("network spec: cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_network_json(buffer.str());
}

}  // namespace qsw
