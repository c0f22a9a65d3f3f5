#include "gaussdfe/config.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace gaussdfe {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {"kind",   "taps",       "H",              "gains",      "block_length",
                                          "powers", "input_gram", "noise_variance", "noise_gram", "groups",
                                          "order",  "seed",       "trials",         "log_base",   "outputs"};

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& doc, const std::string& key) {
    if (!doc.contains(key)) {
        throw ConfigError("$." + key, "required key is missing");
    }
    return doc.at(key);
}

double real_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(path, "expected a finite number");
    }
    return d;
}

cplx complex_number(const json& v, const std::string& path) {
    if (v.is_number()) {
        return {real_number(v, path), 0.0};
    }
    if (v.is_array() && v.size() == 2) {
        return {real_number(v[0], at(path, 0)), real_number(v[1], at(path, 1))};
    }
    throw ConfigError(path, "expected a complex value: a number or an [re, im] pair");
}

std::vector<cplx> complex_vector(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(path, "expected a non-empty array of complex values");
    }
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(complex_number(v[i], at(path, i)));
    }
    return out;
}

CMatrix complex_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(path, "expected a non-empty array of rows");
    }
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    std::vector<cplx> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = complex_vector(v[r], at(path, r));
        if (r == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw ConfigError(at(path, r), "row has " + std::to_string(row.size()) + " entries, expected " +
                                               std::to_string(cols));
        }
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return CMatrix(rows, cols, std::move(entries));
}

std::size_t positive_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        throw ConfigError(path, "expected a positive integer");
    }
    return v.get<std::size_t>();
}

HermitianGram gram_matrix(const json& v, const std::string& path, std::size_t expected_dim) {
    const CMatrix m = complex_matrix(v, path);
    if (m.rows() != expected_dim || m.cols() != expected_dim) {
        throw ConfigError(path, "expected a " + std::to_string(expected_dim) + "x" + std::to_string(expected_dim) +
                                    " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    try {
        HermitianGram g(m);
        ldl_semidefinite(g);
        return g;
    } catch (const NotPositiveSemidefinite& e) {
        throw ConfigError(path, std::string("not positive semidefinite (") + e.what() + ")");
    } catch (const NotHermitian& e) {
        throw ConfigError(path, std::string("not Hermitian (") + e.what() + ")");
    }
}

HermitianGram input_gram(const json& doc, std::size_t n_inputs) {
    if (doc.contains("powers") && doc.contains("input_gram")) {
        throw ConfigError("$.input_gram", "give either powers or input_gram, not both");
    }
    if (doc.contains("input_gram")) {
        return gram_matrix(doc["input_gram"], "$.input_gram", n_inputs);
    }
    std::vector<double> p(n_inputs, 1.0);
    if (doc.contains("powers")) {
        const json& v = doc["powers"];
        if (v.is_number()) {
            p.assign(n_inputs, real_number(v, "$.powers"));
        } else if (v.is_array() && v.size() == n_inputs) {
            for (std::size_t i = 0; i < n_inputs; ++i) {
                p[i] = real_number(v[i], at("$.powers", i));
            }
        } else {
            throw ConfigError("$.powers", "expected a number or an array of " + std::to_string(n_inputs) + " numbers");
        }
        for (std::size_t i = 0; i < n_inputs; ++i) {
            if (p[i] < 0.0) {
                throw ConfigError("$.powers", "powers must be >= 0");
            }
        }
    }
    return HermitianGram::diagonal(p);
}

HermitianGram noise_gram(const json& doc, std::size_t n_outputs) {
    const bool has_var = doc.contains("noise_variance");
    const bool has_gram = doc.contains("noise_gram");
    if (has_var == has_gram) {
        throw ConfigError("$.noise_variance", "give exactly one of noise_variance or noise_gram");
    }
    HermitianGram g;
    if (has_var) {
        const double s2 = real_number(doc["noise_variance"], "$.noise_variance");
        if (s2 <= 0.0) {
            throw ConfigError("$.noise_variance", "must be > 0");
        }
        g = HermitianGram::diagonal(std::vector<double>(n_outputs, s2));
    } else {
        g = gram_matrix(doc["noise_gram"], "$.noise_gram", n_outputs);
    }
    if (ldl_semidefinite(g).rank < n_outputs) {
        throw ConfigError(has_var ? "$.noise_variance" : "$.noise_gram", "noise Gram must be full rank");
    }
    return g;
}

std::vector<VariableGroup> groups_from(const json& doc) {
    std::vector<VariableGroup> out;
    if (!doc.contains("groups")) {
        return out;
    }
    const json& v = doc["groups"];
    if (!v.is_array() || v.empty()) {
        throw ConfigError("$.groups", "expected a non-empty array of label arrays");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string path = at("$.groups", i);
        if (!v[i].is_array() || v[i].empty()) {
            throw ConfigError(path, "expected a non-empty array of labels");
        }
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < v[i].size(); ++k) {
            if (!v[i][k].is_string() || v[i][k].get<std::string>().empty()) {
                throw ConfigError(at(path, k), "expected a non-empty label string");
            }
            labels.push_back(v[i][k].get<std::string>());
        }
        out.push_back({group_name(labels), std::move(labels)});
    }
    return out;
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (const auto& c : m.row(r)) {
            row.push_back(complex_json(c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::string group_name(const std::vector<std::string>& labels) {
    std::string name;
    for (const auto& l : labels) {
        if (!name.empty()) {
            name += '+';
        }
        name += l;
    }
    return name;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_json(doc);
}

RunConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("$", "expected a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!kKnownKeys.contains(key)) {
            throw ConfigError("$." + key, "unknown key");
        }
    }

    const json& kind_v = require(doc, "kind");
    if (!kind_v.is_string()) {
        throw ConfigError("$.kind", "expected \"isi\", \"mimo\" or \"mac\"");
    }
    const std::string kind = kind_v.get<std::string>();
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
            if (doc.contains(k)) {
                throw ConfigError(std::string("$.") + k, "not allowed for kind \"" + kind + "\"");
            }
        }
    };

    const std::vector<VariableGroup> groups = groups_from(doc);
    RunConfig cfg;
    try {
        if (kind == "isi") {
            forbid({"H", "gains"});
            const auto taps = complex_vector(require(doc, "taps"), "$.taps");
            const std::size_t n = positive_count(require(doc, "block_length"), "$.block_length");
            cfg.scenario = make_isi_scenario(taps, n, input_gram(doc, n), noise_gram(doc, n), groups);
        } else if (kind == "mimo") {
            forbid({"taps", "gains", "block_length"});
            CMatrix h = complex_matrix(require(doc, "H"), "$.H");
            const std::size_t nin = h.cols();
            const std::size_t nout = h.rows();
            cfg.scenario = make_mimo_scenario(std::move(h), input_gram(doc, nin), noise_gram(doc, nout), groups);
        } else if (kind == "mac") {
            forbid({"taps", "H", "block_length"});
            const auto gains = complex_vector(require(doc, "gains"), "$.gains");
            const HermitianGram nn = noise_gram(doc, 1);
            cfg.scenario = make_mac_scenario(gains, input_gram(doc, gains.size()), nn(0, 0).real(), groups);
        } else {
            throw ConfigError("$.kind", "expected \"isi\", \"mimo\" or \"mac\", got \"" + kind + "\"");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(doc.contains("groups") ? "$.groups" : "$", e.what());
    }

    const json& order_v = require(doc, "order");
    if (!order_v.is_array() || order_v.empty()) {
        throw ConfigError("$.order", "expected a non-empty array of group names");
    }
    for (std::size_t i = 0; i < order_v.size(); ++i) {
        if (!order_v[i].is_string()) {
            throw ConfigError(at("$.order", i), "expected a group name");
        }
        cfg.order.push_back(order_v[i].get<std::string>());
    }
    try {
        incremental_rates(build_joint_gram(cfg.scenario), cfg.order);
    } catch (const InvalidArgument& e) {
        throw ConfigError("$.order", e.what());
    } catch (const SingularGram&) {
        // Singular Grams are reported by the commands that need full rank.
    }

    if (doc.contains("seed")) {
        const json& v = doc["seed"];
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError("$.seed", "expected a non-negative integer");
        }
        cfg.seed = v.get<std::uint64_t>();
    }
    if (doc.contains("trials")) {
        cfg.trials = positive_count(doc["trials"], "$.trials");
    }
    if (doc.contains("log_base")) {
        const json& v = doc["log_base"];
        if (v == "bits") {
            cfg.log_base = LogBase::Bits;
        } else if (v == "nats") {
            cfg.log_base = LogBase::Nats;
        } else {
            throw ConfigError("$.log_base", "expected \"bits\" or \"nats\"");
        }
    }
    if (doc.contains("outputs")) {
        const json& v = doc["outputs"];
        if (!v.is_object()) {
            throw ConfigError("$.outputs", "expected an object");
        }
        for (const auto& [key, value] : v.items()) {
            if (key != "dir") {
                throw ConfigError("$.outputs." + key, "unknown key");
            }
            if (!value.is_string()) {
                throw ConfigError("$.outputs.dir", "expected a path string");
            }
            cfg.out_dir = value.get<std::string>();
        }
    }
    return cfg;
}

json to_canonical_json(const RunConfig& cfg) {
    const ChannelScenario& s = cfg.scenario;
    json doc;
    doc["kind"] = to_string(s.kind);
    switch (s.kind) {
    case ChannelKind::Isi: {
        json taps = json::array();
        for (const auto& t : s.taps) {
            taps.push_back(complex_json(t));
        }
        doc["taps"] = std::move(taps);
        doc["block_length"] = s.block_length;
        break;
    }
    case ChannelKind::Mimo:
        doc["H"] = matrix_json(s.H);
        break;
    case ChannelKind::Mac: {
        json gains = json::array();
        for (const auto& g : s.H.row(0)) {
            gains.push_back(complex_json(g));
        }
        doc["gains"] = std::move(gains);
        break;
    }
    }

    // The gram follows the concatenation of group labels.
    std::vector<std::size_t> perm;
    json groups = json::array();
    for (const auto& g : s.groups) {
        groups.push_back(g.labels);
        for (const auto& l : g.labels) {
            perm.push_back(s.input.index_of(l));
        }
    }
    doc["input_gram"] = matrix_json(s.input.gram().matrix().select(perm, perm));
    doc["noise_gram"] = matrix_json(s.noise_gram.matrix());
    doc["groups"] = std::move(groups);
    doc["order"] = cfg.order;
    if (cfg.seed) {
        doc["seed"] = *cfg.seed;
    }
    if (cfg.trials) {
        doc["trials"] = *cfg.trials;
    }
    doc["log_base"] = cfg.log_base == LogBase::Bits ? "bits" : "nats";
    if (cfg.out_dir) {
        doc["outputs"] = {{"dir", *cfg.out_dir}};
    }
    return doc;
}

} // namespace gaussdfe
