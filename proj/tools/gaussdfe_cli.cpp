// gaussdfe: successive-decoding analysis of linear Gaussian channels.
//
//   gaussdfe analyze  <config.json> [--out-dir D] [--format csv|json|both]
//   gaussdfe simulate <config.json> [--seed S] ...
//   gaussdfe codebook <config.json> --stage K --n N --rate R [--seed S] ...
//
// Exit codes: 0 success, 1 input error, 2 self-check failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gaussdfe/commands.hpp"

namespace fs = std::filesystem;
using namespace gaussdfe;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) {
        throw ConfigError("$", "cannot read config file " + p.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gram-matrix analysis of successive decoding on linear Gaussian channels"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string format = "both";
    std::optional<std::uint64_t> seed;
    CodebookParams cb;

    const std::map<std::string, OutputFormat> formats = {
        {"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}, {"both", OutputFormat::Both}};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "scenario configuration (JSON)")->required();
        sub->add_option("--out-dir", out_dir, "directory for report files (default: config outputs.dir or .)");
        sub->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--seed", seed, "override the config seed");
    };
    auto* analyze = app.add_subcommand("analyze", "incremental rates, entropies and DFE filters");
    add_common(analyze);
    auto* simulate = app.add_subcommand("simulate", "genie-aided Monte Carlo check of the stage error variances");
    add_common(simulate);
    auto* codebook = app.add_subcommand("codebook", "random-codebook word error rate for one stage");
    add_common(codebook);
    codebook->add_option("--stage", cb.stage, "1-based stage in the decoding order")->required();
    codebook->add_option("--n", cb.block_length, "block length (channel uses)")->required();
    codebook->add_option("--rate", cb.rate_bits, "code rate in bits per channel use")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        RunConfig cfg = parse_config(read_file(config_path));
        if (seed) {
            cfg.seed = seed;
        }
        CommandResult res;
        if (analyze->parsed()) {
            res = cmd_analyze(cfg);
        } else if (simulate->parsed()) {
            res = cmd_simulate(cfg);
        } else {
            res = cmd_codebook(cfg, cb);
        }
        const fs::path dir = !out_dir.empty() ? fs::path(out_dir) : fs::path(cfg.out_dir.value_or("."));
        write_report(res.report, dir, formats.at(format));
        std::cout << res.message;
        return res.exit_code;
    } catch (const gaussdfe::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}
