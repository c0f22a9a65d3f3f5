#include "gaussdfe/montecarlo.hpp"

#include <cmath>
#include <numbers>

namespace gaussdfe {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Index of each label of `wanted` inside the set.
std::vector<std::size_t> positions(const GaussianSet& set, const std::vector<std::string>& wanted) {
    std::vector<std::size_t> out;
    out.reserve(wanted.size());
    for (const auto& l : wanted) {
        out.push_back(set.index_of(l));
    }
    return out;
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = k;
    }
    return v;
}

// Everything a per-trial channel simulation needs, in decoding order.
struct ChannelSampler {
    InnovationsForm input;  // innovations of R_xx in decoding order
    InnovationsForm noise;  // innovations of R_nn
    CMatrix h;              // H with columns in decoding order
    std::size_t nx = 0;
    std::size_t ny = 0;

    ChannelSampler(const ChannelScenario& s, const std::vector<std::string>& ordered_labels) {
        const auto perm = positions(s.input, ordered_labels);
        input = ldl_semidefinite(s.input.gram().principal(perm));
        noise = ldl_semidefinite(s.noise_gram);
        h = s.H.select(iota(s.H.rows()), perm);
        nx = perm.size();
        ny = s.H.rows();
    }

    void draw_innovations(SplitMix64& rng, std::span<cplx> eps) const {
        for (std::size_t k = 0; k < nx; ++k) {
            eps[k] = rng.proper_normal(input.d2[k]);
        }
    }

    // x = L eps, y = H x + N with fresh noise from rng. scratch holds 2 ny.
    void transmit(SplitMix64& rng, std::span<const cplx> eps, std::span<cplx> x, std::span<cplx> y,
                  std::span<cplx> scratch) const {
        matvec(input.L, eps, x);
        const auto eta = scratch.first(ny);
        const auto n = scratch.subspan(ny, ny);
        for (std::size_t k = 0; k < ny; ++k) {
            eta[k] = rng.proper_normal(noise.d2[k]);
        }
        matvec(noise.L, eta, n);
        matvec(h, x, y);
        for (std::size_t k = 0; k < ny; ++k) {
            y[k] += n[k];
        }
    }
};

} // namespace

double SplitMix64::uniform_open0() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
}

cplx SplitMix64::proper_normal(double variance) {
    const double u1 = uniform_open0();
    const double u2 = uniform_open0();
    // Box-Muller: (G1 + i G2) sqrt(v/2) = sqrt(-v ln u1) e^{i 2 pi u2}
    const double r = std::sqrt(-variance * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

SplitMix64 substream(const SeedSpec& seed, std::uint64_t trial, std::uint64_t sub) {
    std::uint64_t key = mix(seed.master_seed);
    key = mix(key ^ trial);
    key = mix(key ^ (sub * 0xd1b54a32d192ed03ULL));
    return SplitMix64(key);
}

SampleBatch sample_gaussian(const GaussianSet& x, const SeedSpec& seed, std::size_t n_trials) {
    const InnovationsForm f = innovations(x);
    const std::size_t n = x.dim();
    SampleBatch b{x.labels(), CMatrix(n_trials, n)};
    std::vector<cplx> e(n);
    for (std::size_t t = 0; t < n_trials; ++t) {
        SplitMix64 rng = substream(seed, t);
        for (std::size_t k = 0; k < n; ++k) {
            e[k] = rng.proper_normal(f.d2[k]);
        }
        matvec(f.L, e, b.values.row(t));
    }
    return b;
}

HermitianGram empirical_gram(const SampleBatch& b) {
    const std::size_t n = b.n_trials();
    if (n < 2) {
        throw InvalidArgument("empirical_gram: need at least 2 trials, got " + std::to_string(n));
    }
    const std::size_t d = b.values.cols();
    CMatrix g(d, d);
    for (std::size_t t = 0; t < n; ++t) {
        const auto row = b.values.row(t);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                g(i, k) += row[i] * std::conj(row[k]);
            }
        }
    }
    g *= 1.0 / static_cast<double>(n);
    return HermitianGram(g);
}

// ---------------------------------------------------------------------------
// Genie-aided decision feedback

double GenieRunReport::rel_err(std::size_t var) const {
    const double th = theory_var[var];
    return th == 0.0 ? std::abs(empirical_var[var]) : std::abs(empirical_var[var] - th) / th;
}

double GenieRunReport::max_abs_corr() const { return error_observation_corr.max_abs(); }

double GenieRunReport::corr_bound() const { return 5.0 / std::sqrt(static_cast<double>(n_trials)); }

bool GenieRunReport::variances_within_bounds() const {
    const double k = corr_bound();
    for (std::size_t i = 0; i < theory_var.size(); ++i) {
        // 1e-12 absorbs round-off when the theoretical variance is ~0.
        if (std::abs(empirical_var[i] - theory_var[i]) > k * theory_var[i] + 1e-12) {
            return false;
        }
    }
    return true;
}

bool GenieRunReport::correlations_within_bounds() const { return max_abs_corr() <= corr_bound(); }

GenieRunReport run_genie_dfe(const ChannelScenario& s, const GroupList& order, const DfeFilters& f,
                             const SeedSpec& seed, std::size_t n_trials) {
    if (f.order != order) {
        throw InvalidArgument("run_genie_dfe: filters were built for a different decoding order");
    }
    if (n_trials < 2) {
        throw InvalidArgument("run_genie_dfe: need at least 2 trials");
    }
    const ChannelSampler ch(s, f.labels);
    if (f.forward.rows() != ch.nx || f.forward.cols() != ch.ny) {
        throw DimensionMismatch("run_genie_dfe: filters do not match the scenario dimensions");
    }
    const std::size_t nx = ch.nx;
    const std::size_t ny = ch.ny;

    std::vector<cplx> eps(nx), x(nx), y(ny), scratch(2 * ny), xhat(nx), e(nx), pred(nx);
    std::vector<double> err_power(nx, 0.0);
    std::vector<double> y_power(ny, 0.0);
    CMatrix err_y(nx, ny);
    CMatrix ee(nx, nx);

    for (std::size_t t = 0; t < n_trials; ++t) {
        SplitMix64 rng = substream(seed, t);
        ch.draw_innovations(rng, eps);
        ch.transmit(rng, eps, x, y, scratch);
        matvec(f.forward, y, xhat);
        for (std::size_t i = 0; i < nx; ++i) {
            e[i] = x[i] - xhat[i]; // genie: true X is fed back
        }
        matvec(f.predictor, e, pred);
        for (std::size_t i = 0; i < nx; ++i) {
            const cplx err = x[i] - (xhat[i] + pred[i]);
            err_power[i] += std::norm(err);
            for (std::size_t k = 0; k < ny; ++k) {
                err_y(i, k) += err * std::conj(y[k]);
            }
            for (std::size_t k = 0; k < nx; ++k) {
                ee(i, k) += e[i] * std::conj(e[k]);
            }
        }
        for (std::size_t k = 0; k < ny; ++k) {
            y_power[k] += std::norm(y[k]);
        }
    }

    const double inv_n = 1.0 / static_cast<double>(n_trials);
    GenieRunReport r;
    r.n_trials = n_trials;
    r.order = order;
    r.labels = f.labels;
    r.pivots = ldl_semidefinite(f.error_gram).d2;
    r.error_observation_corr = CMatrix(nx, ny);
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t st = f.stage_of(i);
        const std::size_t local = i - f.stage_offsets[st];
        r.stage.push_back(st + 1);
        r.theory_var.push_back(f.stage_error_grams[st](local, local).real());
        r.empirical_var.push_back(err_power[i] * inv_n);
        for (std::size_t k = 0; k < ny; ++k) {
            const double denom = std::sqrt(err_power[i] * inv_n * y_power[k] * inv_n);
            r.error_observation_corr(i, k) = denom > 0.0 ? std::abs(err_y(i, k) * inv_n) / denom : 0.0;
        }
    }
    ee *= inv_n;
    r.forward_error_gram = HermitianGram(ee);
    return r;
}

// ---------------------------------------------------------------------------
// Random-codebook experiment

std::uint64_t codebook_size(std::size_t block_length, double rate_bits) {
    if (block_length == 0) {
        throw InvalidArgument("codebook: block length must be positive");
    }
    if (!(rate_bits >= 0.0) || !std::isfinite(rate_bits)) {
        throw InvalidArgument("codebook: rate must be finite and >= 0");
    }
    const double bits = static_cast<double>(block_length) * rate_bits;
    if (bits > kMaxCodebookBits) {
        throw InvalidArgument("codebook: n*R = " + std::to_string(bits) + " bits exceeds the cap of " +
                              std::to_string(kMaxCodebookBits));
    }
    return static_cast<std::uint64_t>(std::ceil(std::exp2(bits)));
}

CodebookExperiment run_codebook_experiment(const ChannelScenario& s, const GroupList& order, std::size_t stage,
                                           std::size_t block_length, double rate_bits, const SeedSpec& seed,
                                           std::size_t trials) {
    const std::uint64_t size = codebook_size(block_length, rate_bits);
    if (stage == 0 || stage > order.size()) {
        throw InvalidArgument("codebook: stage " + std::to_string(stage) + " is outside 1.." +
                              std::to_string(order.size()));
    }
    const JointGram j = build_joint_gram(s);
    const DfeFilters f = dfe_filters(j, order);
    const RateProfile rates = incremental_rates(j, order);
    const ChannelSampler ch(s, f.labels);
    const std::size_t nx = ch.nx;
    const std::size_t ny = ch.ny;
    const std::size_t lo = f.stage_offsets[stage - 1];
    const std::size_t hi = f.stage_offsets[stage];
    const std::size_t m = hi - lo;

    // Stage innovations W = L_kk eps_k have Gram Q (X_k given earlier stages).
    std::vector<std::size_t> blk(m);
    for (std::size_t k = 0; k < m; ++k) {
        blk[k] = lo + k;
    }
    const CMatrix lkk = ch.input.L.select(blk, blk);
    std::vector<double> dk(ch.input.d2.begin() + static_cast<std::ptrdiff_t>(lo),
                           ch.input.d2.begin() + static_cast<std::ptrdiff_t>(hi));
    CMatrix ld = lkk;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            ld(r, c) *= dk[c];
        }
    }
    const HermitianGram q(matmul(ld, conj_transpose(lkk)));
    const HermitianGram& serr = f.stage_error_grams[stage - 1];

    // u = z - E[X_k | past] satisfies u = G W + v, v ~ CN(0, V), with
    // G = (Q - S) Q^-1 and V = S - S Q^-1 S.
    const CMatrix g = conj_transpose(solve_psd(q, q.matrix() - serr.matrix()));
    CMatrix v = serr.matrix() - matmul(serr.matrix(), solve_psd(q, serr.matrix()));
    const double delta = 1e-12 * q.scale();
    for (std::size_t k = 0; k < m; ++k) {
        v(k, k) += delta;
    }
    const CMatrix vinv = solve_psd(HermitianGram(v), CMatrix::identity(m));
    const CMatrix mean_map = matmul(g, lkk);

    CodebookExperiment out;
    out.stage = stage;
    out.block_length = block_length;
    out.rate_bits = rate_bits;
    out.incremental_rate_bits = rates.rates_bits()[stage - 1];
    out.codebook_size = size;
    out.trials = trials;

    std::vector<cplx> eps(nx), x(nx), y(ny), scratch(2 * ny), xhat(nx), e(nx), pred(nx), w(m), cw(m), r(m), mu(m);
    std::vector<cplx> u(block_length * m);
    std::vector<cplx> sent(block_length * m);

    auto draw_codeword_use = [&](SplitMix64& rng, std::span<cplx> out_eps) {
        for (std::size_t k = 0; k < m; ++k) {
            out_eps[k] = rng.proper_normal(dk[k]);
        }
    };
    // Metric contribution of one channel use.
    auto use_metric = [&](std::size_t use, std::span<const cplx> cand) {
        matvec(mean_map, cand, mu);
        for (std::size_t k = 0; k < m; ++k) {
            r[k] = u[use * m + k] - mu[k];
        }
        double acc = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            cplx row{};
            for (std::size_t b = 0; b < m; ++b) {
                row += vinv(a, b) * r[b];
            }
            acc += (std::conj(r[a]) * row).real();
        }
        return acc;
    };

    for (std::size_t t = 0; t < trials; ++t) {
        SplitMix64 rng = substream(seed, t, 0);
        const auto tx = static_cast<std::uint64_t>(rng.uniform_open0() * static_cast<double>(size)) % size;
        SplitMix64 tx_rng = substream(seed, t, tx + 1);
        for (std::size_t use = 0; use < block_length; ++use) {
            draw_codeword_use(tx_rng, std::span<cplx>(sent).subspan(use * m, m));
        }
        if (size == 1) {
            continue;
        }

        for (std::size_t use = 0; use < block_length; ++use) {
            ch.draw_innovations(rng, eps);
            for (std::size_t k = 0; k < m; ++k) {
                eps[lo + k] = sent[use * m + k];
            }
            ch.transmit(rng, eps, x, y, scratch);
            matvec(f.forward, y, xhat);
            for (std::size_t i = 0; i < nx; ++i) {
                e[i] = x[i] - xhat[i];
            }
            matvec(f.predictor, e, pred);
            matvec(lkk, std::span<const cplx>(sent).subspan(use * m, m), w);
            for (std::size_t k = 0; k < m; ++k) {
                // Only earlier stages feed the predictor rows of this stage.
                const cplx z = xhat[lo + k] + pred[lo + k];
                u[use * m + k] = z - (x[lo + k] - w[k]);
            }
        }

        double sent_metric = 0.0;
        for (std::size_t use = 0; use < block_length; ++use) {
            sent_metric += use_metric(use, std::span<const cplx>(sent).subspan(use * m, m));
        }

        bool error = false;
        for (std::uint64_t c = 0; c < size && !error; ++c) {
            if (c == tx) {
                continue;
            }
            SplitMix64 crng = substream(seed, t, c + 1);
            double metric = 0.0;
            bool pruned = false;
            for (std::size_t use = 0; use < block_length; ++use) {
                draw_codeword_use(crng, cw);
                metric += use_metric(use, cw);
                if (metric > sent_metric) {
                    pruned = true;
                    break;
                }
            }
            // Ties count against the decoder.
            error = !pruned;
        }
        if (error) {
            ++out.word_errors;
        }
    }
    return out;
}

} // namespace gaussdfe
