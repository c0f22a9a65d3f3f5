#include "gaussdfe/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gaussdfe/montecarlo.hpp"

namespace gaussdfe {

using nlohmann::json;

namespace {

constexpr double kRateSumTolNats = 1e-9;

std::string cell_text(const Table::Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) {
        return *s;
    }
    if (const auto* d = std::get_if<double>(&c)) {
        return format_double(*d);
    }
    return std::to_string(std::get<std::int64_t>(c));
}

json cell_json(const Table::Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) {
        return *s;
    }
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) {
            return format_double(*d);
        }
        return *d;
    }
    return std::get<std::int64_t>(c);
}

Table::Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

double to_bits(double nats) { return nats / std::numbers::ln2; }

void add_matrix(Table& t, const std::string& name, const CMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            t.rows.push_back({name, count(r), count(c), m(r, c).real(), m(r, c).imag()});
        }
    }
}

std::string fmt_rate(double nats, LogBase base) {
    if (base == LogBase::Bits) {
        return format_double(to_bits(nats)) + " bits";
    }
    return format_double(nats) + " nats";
}

} // namespace

std::string format_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string Table::to_csv() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        os << (k ? "," : "") << columns[k];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            os << (k ? "," : "") << cell_text(row[k]);
        }
        os << '\n';
    }
    return os.str();
}

json Table::to_json() const {
    json out = json::array();
    for (const auto& row : rows) {
        json obj = json::object();
        for (std::size_t k = 0; k < row.size() && k < columns.size(); ++k) {
            obj[columns[k]] = cell_json(row[k]);
        }
        out.push_back(std::move(obj));
    }
    return out;
}

json ReportBundle::to_json() const {
    json doc;
    doc["command"] = command;
    doc["summary"] = summary;
    json tabs = json::object();
    for (const auto& t : tables) {
        tabs[t.name] = {{"columns", t.columns}, {"rows", t.to_json()}};
    }
    doc["tables"] = std::move(tabs);
    return doc;
}

const Table& ReportBundle::table(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) {
            return t;
        }
    }
    throw InvalidArgument("report has no table '" + name + "'");
}

// ---------------------------------------------------------------------------

CommandResult cmd_analyze(const RunConfig& cfg) {
    const JointGram j = build_joint_gram(cfg.scenario);
    const RateProfile p = incremental_rates(j, cfg.order);
    const DfeFilters f = dfe_filters(j, cfg.order);

    CommandResult res;
    res.report.command = "analyze";

    Table rates{"rates", {"stage", "group", "rate_bits", "rate_nats"}, {}};
    for (std::size_t i = 0; i < p.order.size(); ++i) {
        rates.rows.push_back({count(i + 1), p.order[i], to_bits(p.rates_nats[i]), p.rates_nats[i]});
    }
    rates.rows.push_back({std::string("total"), std::string(), p.total_bits(), p.total_nats});
    rates.rows.push_back({std::string("mutual_information"), std::string(), p.reference.bits(), p.reference.nats});

    Table entropy{"entropy", {"quantity", "group", "nats", "bits"}, {}};
    double hx = 0.0;
    double he = 0.0;
    for (std::size_t i = 0; i < p.order.size(); ++i) {
        entropy.rows.push_back({std::string("h_input_given_past"), p.order[i], p.input_entropy_nats[i],
                                to_bits(p.input_entropy_nats[i])});
        hx += p.input_entropy_nats[i];
    }
    for (std::size_t i = 0; i < p.order.size(); ++i) {
        entropy.rows.push_back({std::string("h_error_given_past"), p.order[i], p.error_entropy_nats[i],
                                to_bits(p.error_entropy_nats[i])});
        he += p.error_entropy_nats[i];
    }
    entropy.rows.push_back({std::string("h_input"), std::string(), hx, to_bits(hx)});
    entropy.rows.push_back({std::string("h_error"), std::string(), he, to_bits(he)});

    Table filters{"filters", {"matrix", "row", "col", "re", "im"}, {}};
    add_matrix(filters, "forward", f.forward);
    add_matrix(filters, "predictor", f.predictor);
    add_matrix(filters, "feedforward_std", f.feedforward_std);
    add_matrix(filters, "feedback_std", f.feedback_std);

    res.report.tables = {std::move(rates), std::move(entropy), std::move(filters)};

    const double gap = p.reference.infinite ? std::numeric_limits<double>::infinity()
                                            : std::abs(p.total_nats - p.reference.nats);
    const bool ok = gap <= kRateSumTolNats;
    res.report.summary = {{"decision_labels", f.labels},
                          {"total_bits", p.total_bits()},
                          {"total_nats", p.total_nats},
                          {"mutual_information_bits", p.reference.bits()},
                          {"mutual_information_nats", p.reference.nats},
                          {"rate_sum_gap_nats", gap},
                          {"rate_sum_check", ok ? "pass" : "fail"}};
    res.exit_code = ok ? kExitOk : kExitSelfCheckFailed;

    std::ostringstream msg;
    for (std::size_t i = 0; i < p.order.size(); ++i) {
        msg << "stage " << i + 1 << " (" << p.order[i] << "): " << fmt_rate(p.rates_nats[i], cfg.log_base) << '\n';
    }
    msg << "total: " << fmt_rate(p.total_nats, cfg.log_base) << '\n';
    msg << "I(X;Y): " << fmt_rate(p.reference.nats, cfg.log_base) << '\n';
    msg << "rate-sum check: " << (ok ? "pass" : "FAIL") << " (gap " << format_double(gap) << " nats)\n";
    res.message = msg.str();
    return res;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    if (!cfg.seed) {
        throw ConfigError("$.seed", "simulate needs an explicit seed");
    }
    if (!cfg.trials) {
        throw ConfigError("$.trials", "simulate needs a trial count");
    }
    const JointGram j = build_joint_gram(cfg.scenario);
    const DfeFilters f = dfe_filters(j, cfg.order);
    const GenieRunReport r = run_genie_dfe(cfg.scenario, cfg.order, f, SeedSpec{*cfg.seed}, *cfg.trials);

    CommandResult res;
    res.report.command = "simulate";
    Table genie{"genie", {"stage", "theory_var", "empirical_var", "rel_err", "n_trials"}, {}};
    Table orth{"orthogonality", {"stage", "label", "max_abs_corr", "bound"}, {}};
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        genie.rows.push_back({count(r.stage[i]), r.theory_var[i], r.empirical_var[i], r.rel_err(i), count(r.n_trials)});
        double worst = 0.0;
        for (std::size_t k = 0; k < r.error_observation_corr.cols(); ++k) {
            worst = std::max(worst, std::abs(r.error_observation_corr(i, k)));
        }
        orth.rows.push_back({count(r.stage[i]), r.labels[i], worst, r.corr_bound()});
    }
    res.report.tables = {std::move(genie), std::move(orth)};

    const bool var_ok = r.variances_within_bounds();
    const bool corr_ok = r.correlations_within_bounds();
    res.report.summary = {{"seed", *cfg.seed},
                          {"n_trials", r.n_trials},
                          {"decision_labels", r.labels},
                          {"pivots", r.pivots},
                          {"max_abs_corr", r.max_abs_corr()},
                          {"corr_bound", r.corr_bound()},
                          {"variance_check", var_ok ? "pass" : "fail"},
                          {"orthogonality_check", corr_ok ? "pass" : "fail"}};
    res.exit_code = var_ok && corr_ok ? kExitOk : kExitSelfCheckFailed;

    std::ostringstream msg;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        msg << "stage " << r.stage[i] << " " << r.labels[i] << ": theory " << format_double(r.theory_var[i])
            << ", empirical " << format_double(r.empirical_var[i]) << ", rel_err " << format_double(r.rel_err(i))
            << '\n';
    }
    msg << "variance check (5 s.e.): " << (var_ok ? "pass" : "FAIL") << '\n';
    msg << "orthogonality check: max |corr| " << format_double(r.max_abs_corr()) << " vs bound "
        << format_double(r.corr_bound()) << ": " << (corr_ok ? "pass" : "FAIL") << '\n';
    res.message = msg.str();
    return res;
}

CommandResult cmd_codebook(const RunConfig& cfg, const CodebookParams& p) {
    if (!cfg.seed) {
        throw ConfigError("$.seed", "codebook needs an explicit seed");
    }
    if (!cfg.trials) {
        throw ConfigError("$.trials", "codebook needs a trial count");
    }
    const CodebookExperiment e = run_codebook_experiment(cfg.scenario, cfg.order, p.stage, p.block_length,
                                                         p.rate_bits, SeedSpec{*cfg.seed}, *cfg.trials);
    CommandResult res;
    res.report.command = "codebook";
    Table t{"codebook", {"stage", "n", "R_bits", "incremental_rate_bits", "trials", "wer"}, {}};
    t.rows.push_back({count(e.stage), count(e.block_length), e.rate_bits, e.incremental_rate_bits, count(e.trials),
                      e.wer()});
    res.report.tables = {std::move(t)};
    res.report.summary = {{"seed", *cfg.seed},
                          {"codebook_size", e.codebook_size},
                          {"word_errors", e.word_errors},
                          {"stage_group", cfg.order[e.stage - 1]}};
    std::ostringstream msg;
    msg << "stage " << e.stage << " (" << cfg.order[e.stage - 1] << "), n = " << e.block_length
        << ", R = " << format_double(e.rate_bits) << " bits (R_i = " << format_double(e.incremental_rate_bits)
        << "), " << e.codebook_size << " codewords: WER " << format_double(e.wer()) << " over " << e.trials
        << " trials\n";
    res.message = msg.str();
    return res;
}

void write_report(const ReportBundle& report, const std::filesystem::path& dir, OutputFormat format) {
    std::filesystem::create_directories(dir);
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream os(path, std::ios::binary);
        if (!os) {
            throw Error("cannot write " + path.string());
        }
        os << text;
    };
    if (format != OutputFormat::Json) {
        for (const auto& t : report.tables) {
            write(dir / (t.name + ".csv"), t.to_csv());
        }
    }
    if (format != OutputFormat::Csv) {
        write(dir / (report.command + ".json"), report.to_json().dump(2) + "\n");
    }
}

} // namespace gaussdfe
