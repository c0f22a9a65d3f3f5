#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gaussdfe/config.hpp"

using namespace gaussdfe;

namespace {

std::string data_file(const std::string& name) {
    std::ifstream is(std::string(GAUSSDFE_TEST_DATA) + "/" + name);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kMinimalMac = R"({"kind": "mac", "gains": [[1, 0], [1, 0]], "powers": [1, 1], "noise_variance": 1,
                              "groups": [["u1"], ["u2"]], "order": ["u1", "u2"]})";

// Key path reported for a failing document.
std::string error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key;
    }
    return "<no error>";
}

std::string error_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "<no error>";
}

// kMinimalMac with one key replaced or added.
std::string mac_with(const std::string& key, const std::string& value) {
    auto doc = nlohmann::json::parse(kMinimalMac);
    doc[key] = nlohmann::json::parse(value);
    return doc.dump();
}

std::string mac_without(const std::string& key) {
    auto doc = nlohmann::json::parse(kMinimalMac);
    doc.erase(key);
    return doc.dump();
}

} // namespace

TEST_CASE("minimal MAC config") {
    const RunConfig cfg = parse_config(kMinimalMac);
    const ChannelScenario& s = cfg.scenario;
    CHECK(s.kind == ChannelKind::Mac);
    CHECK(s.H == CMatrix{{1.0, 1.0}});
    CHECK(s.input.labels() == std::vector<std::string>{"u1", "u2"});
    CHECK(s.input.gram().matrix() == CMatrix::identity(2));
    CHECK(s.noise_gram.matrix() == CMatrix{{1.0}});
    CHECK(s.groups.size() == 2);
    CHECK(cfg.order == GroupList{"u1", "u2"});
    CHECK_FALSE(cfg.seed.has_value());
    CHECK_FALSE(cfg.trials.has_value());
    CHECK(cfg.log_base == LogBase::Bits);
}

TEST_CASE("config files in the test data") {
    const RunConfig isi = parse_config(data_file("isi4.json"));
    CHECK(isi.scenario.kind == ChannelKind::Isi);
    CHECK(isi.scenario.block_length == 4);
    CHECK(isi.scenario.H(2, 0) == cplx{0.2, 0.0});
    CHECK(isi.scenario.H(1, 0) == cplx{0.5, 0.25});
    CHECK(isi.scenario.groups[0].name == "x1+x2");
    CHECK(isi.order == GroupList{"x4", "x1+x2", "x3"});
    CHECK(isi.log_base == LogBase::Nats);
    CHECK(isi.seed == 7u);
    CHECK(isi.trials == 20000u);

    const RunConfig awgn = parse_config(data_file("awgn.json"));
    CHECK(awgn.scenario.input.gram().matrix() == CMatrix{{3.0}});
    CHECK(awgn.order == GroupList{"x1"});

    // Parses; the singular input Gram is left for the commands to report.
    CHECK_NOTHROW(parse_config(data_file("mimo_dependent.json")));
}

TEST_CASE("missing and unknown keys are named") {
    CHECK(error_key(mac_without("order")) == "$.order");
    CHECK(error_key(mac_without("kind")) == "$.kind");
    CHECK(error_key(mac_without("gains")) == "$.gains");
    CHECK(error_key(mac_without("noise_variance")) == "$.noise_variance");
    CHECK(error_key(mac_with("colour", "1")) == "$.colour");
    CHECK(error_key(mac_with("outputs", R"({"dir": "x", "file": "y"})")) == "$.outputs.file");
    CHECK(error_key(mac_with("H", "[[1, 1]]")) == "$.H");
    CHECK(error_key(mac_with("kind", R"("fdm")")) == "$.kind");
}

TEST_CASE("semantic errors cite the failing key") {
    CHECK(error_key(mac_with("input_gram", "[[1, 2], [2, 1]]")) == "$.input_gram"); // powers also present
    const std::string non_psd = mac_with("input_gram", "[[1, 2], [2, 1]]");
    auto doc = nlohmann::json::parse(non_psd);
    doc.erase("powers");
    CHECK(error_key(doc.dump()) == "$.input_gram");
    CHECK(error_message(doc.dump()).find("not positive semidefinite") != std::string::npos);

    CHECK(error_key(mac_with("trials", "0")) == "$.trials");
    CHECK(error_key(mac_with("trials", "-3")) == "$.trials");
    CHECK(error_key(mac_with("seed", "-1")) == "$.seed");
    CHECK(error_key(mac_with("powers", "[1, 1, 1]")) == "$.powers");
    CHECK(error_key(mac_with("noise_variance", "0")) == "$.noise_variance");
    CHECK(error_key(mac_with("order", R"(["u1"])")) == "$.order");
    CHECK(error_key(mac_with("order", R"(["u1", "u9"])")) == "$.order");
    CHECK(error_key(mac_with("groups", R"([["u1"], ["u1"]])")) == "$.groups");
    CHECK(error_key(mac_with("gains", R"([[1, 0, 2]])")) == "$.gains[0]");
    CHECK(error_key(mac_with("log_base", R"("decibels")")) == "$.log_base");

    const std::string isi = R"({"kind": "isi", "taps": [1], "block_length": 2, "noise_variance": 1,
                                "input_gram": [[1, 0], [0, 1], [0, 0]], "order": ["x1", "x2"]})";
    CHECK(error_key(isi) == "$.input_gram");
}

TEST_CASE("malformed JSON reports its position") {
    const std::string msg = error_message("{\n  \"kind\": \"mac\",\n  \"gains\": [1, 1\n}");
    CHECK(msg.find("malformed JSON") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(error_key("[1, 2]") == "$");
}

TEST_CASE("canonical JSON round trip is idempotent") {
    for (const std::string text : {std::string(kMinimalMac), data_file("isi4.json"), data_file("awgn.json"),
                                   data_file("mac2.json")}) {
        const nlohmann::json c1 = to_canonical_json(parse_config(text));
        const nlohmann::json c2 = to_canonical_json(parse_config(c1.dump()));
        CHECK(c1 == c2);
        CHECK(c1.dump() == c2.dump());
    }

    const std::string mimo = R"({"kind": "mimo", "H": [[1, [0, 1], 0.5], [0, 2, [1, -1]]],
        "input_gram": [[2, [0.5, 0.5], 0], [[0.5, -0.5], 1, 0], [0, 0, 1]],
        "noise_gram": [[1, 0.25], [0.25, 1]], "groups": [["x3"], ["x1", "x2"]],
        "order": ["x1+x2", "x3"], "seed": 3, "trials": 10, "outputs": {"dir": "out"}})";
    const RunConfig cfg = parse_config(mimo);
    CHECK(cfg.scenario.input.labels() == std::vector<std::string>{"x3", "x1", "x2"});
    CHECK(cfg.out_dir == std::string("out"));
    const nlohmann::json c1 = to_canonical_json(cfg);
    const RunConfig back = parse_config(c1.dump());
    CHECK(back.scenario.H == cfg.scenario.H);
    CHECK(back.scenario.input.gram().matrix() == cfg.scenario.input.gram().matrix());
    CHECK(back.scenario.noise_gram.matrix() == cfg.scenario.noise_gram.matrix());
    CHECK(back.order == cfg.order);
    CHECK(to_canonical_json(back) == c1);
}
