#ifndef PADE_DIAGNOSTICS_HPP
#define PADE_DIAGNOSTICS_HPP

#include "pade/analysis.hpp"
#include "pade/core.hpp"
#include "pade/residues.hpp"
#include "pade/signal.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <thread>

namespace pade {

/// sum_j rho_j z_j^{k} for k = first_exponent .. first_exponent + count - 1,
/// using the column-scaled Vandermonde block so large poles never overflow
/// through intermediate powers.
inline ComplexVector reconstruct_samples(std::span<const Complex> poles, std::span<const Complex> residues,
                                         long first_exponent, std::size_t count) {
    if (poles.size() != residues.size()) throw Error(ErrorKind::InvalidArgument, "pole and residue counts differ");
    ScaledVandermonde sv = scaled_vandermonde(poles, first_exponent, count);
    Eigen::VectorXcd scaled(static_cast<Eigen::Index>(poles.size()));
    for (std::size_t j = 0; j < poles.size(); ++j) {
        try {
            scaled(static_cast<Eigen::Index>(j)) = rescale(residues[j], poles[j], sv.exponents[j]);
        } catch (const Error&) {
            throw Error(ErrorKind::Overflow, "reconstruction overflows at pole " + std::to_string(j),
                        static_cast<long>(j));
        }
    }
    Eigen::VectorXcd out = sv.matrix * scaled;
    return ComplexVector(out.data(), out.data() + out.size());
}

/// s~_k = sum_j rho_j z_j^{k-1}, k = 0 .. length-1.
inline Signal reconstruct_signal(std::span<const Complex> poles, std::span<const Complex> residues,
                                 std::size_t length) {
    ComplexVector s = reconstruct_samples(poles, residues, -1, length);
    for (std::size_t k = 0; k < s.size(); ++k)
        if (!is_finite(s[k])) throw Error(ErrorKind::Overflow, "reconstructed sample is not finite", static_cast<long>(k));
    return Signal(std::move(s));
}

/// Samples the model reproduces: s_0 .. s_{2n-1} for [n-1/n];
/// s_0 followed by the fitted s_1 .. s_{2n} for [n/n].
inline ComplexVector model_samples(const PadeModel& model) {
    if (!model.residues) throw Error(ErrorKind::InvalidArgument, "model has no residues");
    const std::size_t n = model.poles.size();
    const bool sub = model.variant == Variant::SubDiagonal;
    const long first = sub ? -1 : 0;
    const std::size_t rows = 2 * n;
    ComplexVector fitted;
    if (model.scaled_residues && model.scaled_residues->first_exponent == first && model.scaled_residues->rows == rows) {
        ScaledVandermonde sv = scaled_vandermonde(model.poles, first, rows);
        Eigen::VectorXcd x = detail::to_eigen(model.scaled_residues->values);
        Eigen::VectorXcd out = sv.matrix * x;
        fitted.assign(out.data(), out.data() + out.size());
    } else {
        fitted = reconstruct_samples(model.poles, *model.residues, first, rows);
    }
    if (!sub) fitted.insert(fitted.begin(), model.s0);
    return fitted;
}

/// ||s - s~|| / ||s|| over the model's window.
inline double backward_error(const Signal& signal, const PadeModel& model) {
    ComplexVector fitted = model_samples(model);
    if (signal.size() < fitted.size()) throw Error(ErrorKind::InvalidLength, "signal shorter than the model window");
    if (model.scaled_residues) {
        // same expression as the least-squares residual
        const std::size_t offset = model.variant == Variant::SubDiagonal ? 0 : 1;
        const std::size_t rows = model.scaled_residues->rows;
        Eigen::VectorXcd b = detail::to_eigen(signal.samples().subspan(offset, rows));
        Eigen::VectorXcd f = detail::to_eigen(std::span<const Complex>(fitted).subspan(offset, rows));
        double bnorm = b.norm();
        return bnorm > 0.0 ? (f - b).norm() / bnorm : (f - b).norm();
    }
    double num = 0.0;
    double den = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < fitted.size(); ++k) scale = std::max({scale, std::abs(signal[k]), std::abs(fitted[k])});
    if (!std::isfinite(scale)) return std::numeric_limits<double>::infinity();
    if (scale == 0.0) return 0.0;
    for (std::size_t k = 0; k < fitted.size(); ++k) {
        num += std::norm((signal[k] - fitted[k]) / scale);
        den += std::norm(signal[k] / scale);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Signal generated exactly by the model's poles and residues.
inline Signal synthesize(const PadeModel& model) {
    if (!model.residues) throw Error(ErrorKind::InvalidArgument, "model has no residues");
    const bool sub = model.variant == Variant::SubDiagonal;
    ComplexVector s = reconstruct_samples(model.poles, *model.residues, sub ? -1 : 0, 2 * model.poles.size());
    if (!sub) s.insert(s.begin(), model.s0);
    for (auto z : s)
        if (!is_finite(z)) throw Error(ErrorKind::Overflow, "synthesized sample is not finite");
    return Signal(std::move(s));
}

/// ||z~ - z|| / ||z|| where z~ are the poles recomputed from the synthesized signal.
inline double forward_pole_error(const PadeModel& model, PoleMethod method) {
    Signal s = synthesize(model);
    ComplexVector recomputed = compute_poles(s, model.poles.size(), model.variant, method);
    return matched_relative_error(recomputed, model.poles);
}

/// ||rho~ - rho|| / ||rho|| with rho~ from the synthesized signal, residues
/// paired through the pole matching.
inline double forward_residue_error(const PadeModel& model, ResidueMethod residue_method, PoleMethod pole_method,
                                    AnalysisOptions opt = {}) {
    if (!model.residues) throw Error(ErrorKind::InvalidArgument, "model has no residues");
    Signal s = synthesize(model);
    opt.variant = model.variant;
    opt.pole_method = pole_method;
    opt.residue_method = residue_method;
    PadeModel again = analyze(s, model.poles.size(), opt);
    if (!again.residues) throw Error(ErrorKind::DegenerateSpectrum, "recomputed spectrum is degenerate");
    auto match = greedy_match(model.poles, again.poles);
    ComplexVector paired(model.poles.size());
    for (std::size_t j = 0; j < paired.size(); ++j) paired[j] = (*again.residues)[*match[j]];
    return relative_difference(paired, *model.residues);
}

/// [n-1/n]: |sum rho_j / (s0 z_j) - 1|; [n/n]: |sum rho_j / s0 - sum (z_j - lambda_j)|.
inline double euler_jacobi_defect(const PadeModel& model) {
    if (!model.residues) throw Error(ErrorKind::InvalidArgument, "model has no residues");
    const auto& rho = *model.residues;
    if (model.variant == Variant::SubDiagonal) {
        Complex sum(0.0);
        for (std::size_t j = 0; j < rho.size(); ++j) {
            if (model.poles[j] == Complex(0.0)) throw Error(ErrorKind::ZeroPole, "pole is zero", static_cast<long>(j));
            sum += rho[j] / (model.s0 * model.poles[j]);
        }
        return std::abs(sum - 1.0);
    }
    if (!model.zeros) throw Error(ErrorKind::InvalidArgument, "[n/n] defect needs the zeros");
    Complex lhs(0.0);
    Complex rhs(0.0);
    for (auto r : rho) lhs += r / model.s0;
    for (auto z : model.poles) rhs += z;
    for (auto l : *model.zeros) rhs -= l;
    return std::abs(lhs - rhs);
}

inline double rms(const Signal& signal) {
    double sum = 0.0;
    for (auto z : signal.samples()) sum += std::norm(z);
    return std::sqrt(sum / static_cast<double>(signal.size()));
}

struct RadiusRow {
    double radius;
    double residue_abs;
    /// ln|rho|; -inf for a hard zero.
    double log_residue;
    /// ln(sigma) - 2(n-1)(|z| - 1); meaningful for |z| > 1.
    double bound_rhs;
    bool outside;
};

struct RadiusProfile {
    std::vector<RadiusRow> rows;
    double sigma = 0.0;
    /// Smallest C with ln|rho| <= -2(n-1)(|z|-1) + C for every outside pole.
    double envelope_intercept = -std::numeric_limits<double>::infinity();
    /// Least-squares C for the fixed slope -2(n-1), over outside poles with nonzero residues.
    double fitted_intercept = std::numeric_limits<double>::quiet_NaN();
    std::size_t outside_count = 0;
    std::size_t hard_zero_count = 0;
    /// log10(max|rho| / min nonzero |rho|) over all poles.
    double decades_spanned = 0.0;

    /// Fraction of outside poles with ln|rho| <= -2(n-1)(|z|-1) + intercept (1 when there are none).
    double fraction_within(double intercept) const {
        if (outside_count == 0) return 1.0;
        std::size_t ok = 0;
        for (const auto& r : rows)
            if (r.outside && r.log_residue - (r.bound_rhs - std::log(sigma)) <= intercept) ++ok;
        return static_cast<double>(ok) / static_cast<double>(outside_count);
    }
    /// Fraction satisfying the bound with C = ln(sigma).
    double fraction_within_sigma() const { return fraction_within(std::log(sigma)); }
};

/// Residue magnitude against pole radius with the exponential-decay bound
/// |rho| |z|^{2(n-1)} <~ sigma, linearised for |z| = 1 + delta.
inline RadiusProfile residue_radius_profile(const PadeModel& model, std::optional<double> sigma = std::nullopt,
                                            const Signal* signal = nullptr) {
    if (!model.residues) throw Error(ErrorKind::InvalidArgument, "model has no residues");
    RadiusProfile out;
    if (sigma) out.sigma = *sigma;
    else if (signal) out.sigma = rms(*signal);
    else throw Error(ErrorKind::InvalidArgument, "noise level needs either sigma or the signal");
    const double slope = 2.0 * (static_cast<double>(model.poles.size()) - 1.0);
    const double log_sigma = std::log(out.sigma);
    double max_abs = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    double sum_c = 0.0;
    std::size_t count_c = 0;
    for (std::size_t j = 0; j < model.poles.size(); ++j) {
        RadiusRow row;
        row.radius = std::abs(model.poles[j]);
        row.residue_abs = std::abs((*model.residues)[j]);
        row.log_residue = row.residue_abs > 0.0 ? std::log(row.residue_abs) : -std::numeric_limits<double>::infinity();
        row.outside = row.radius > 1.0;
        row.bound_rhs = log_sigma - slope * (row.radius - 1.0);
        if (row.residue_abs > 0.0) {
            max_abs = std::max(max_abs, row.residue_abs);
            min_abs = std::min(min_abs, row.residue_abs);
        } else {
            ++out.hard_zero_count;
        }
        if (row.outside) {
            ++out.outside_count;
            double c = row.log_residue + slope * (row.radius - 1.0);
            out.envelope_intercept = std::max(out.envelope_intercept, c);
            if (std::isfinite(c)) {
                sum_c += c;
                ++count_c;
            }
        }
        out.rows.push_back(row);
    }
    if (count_c > 0) out.fitted_intercept = sum_c / static_cast<double>(count_c);
    if (max_abs > 0.0) out.decades_spanned = std::log10(max_abs) - std::log10(min_abs);
    if (out.hard_zero_count > 0) out.decades_spanned = std::log10(max_abs) + 324.0;
    return out;
}

struct ErrorReport {
    std::size_t n = 0;
    Variant variant = Variant::SubDiagonal;
    PoleMethod pole_method = PoleMethod::JMatrix;
    ResidueMethod residue_method = ResidueMethod::VandermondeFull;
    std::optional<double> forward_pole_err;
    std::optional<double> forward_residue_err;
    std::optional<double> euler_jacobi_defect;
    std::optional<double> backward_err;
    std::optional<double> min_pole_gap;
    double timing_poles = 0.0;
    std::vector<std::string> flags;
    std::optional<std::uint64_t> seed;
    std::string source;
};

inline constexpr std::string_view report_columns[] = {
    "n",           "variant",      "pole_method", "residue_method", "forward_pole_err", "forward_residue_err",
    "euler_jacobi_defect", "backward_err", "min_pole_gap", "timing_poles", "flags", "seed", "source",
};

inline nlohmann::json to_json(const ErrorReport& r) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        if (!v) return nullptr;
        if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
        if (std::isnan(*v)) return nullptr;
        return *v;
    };
    nlohmann::json j = nlohmann::json::object();
    j["n"] = r.n;
    j["variant"] = to_string(r.variant);
    j["pole_method"] = to_string(r.pole_method);
    j["residue_method"] = to_string(r.residue_method);
    j["forward_pole_err"] = opt(r.forward_pole_err);
    j["forward_residue_err"] = opt(r.forward_residue_err);
    j["euler_jacobi_defect"] = opt(r.euler_jacobi_defect);
    j["backward_err"] = opt(r.backward_err);
    j["min_pole_gap"] = opt(r.min_pole_gap);
    j["timing_poles"] = r.timing_poles;
    j["flags"] = r.flags;
    j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    j["source"] = r.source;
    return j;
}

inline std::string csv_header() {
    std::string out;
    for (auto c : report_columns) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

inline std::string to_csv_row(const ErrorReport& r) {
    auto num = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
    std::string flags;
    for (const auto& f : r.flags) {
        if (!flags.empty()) flags += ';';
        flags += f;
    }
    std::string out;
    out += std::to_string(r.n) + ',' + std::string(to_string(r.variant)) + ',' + std::string(to_string(r.pole_method)) +
           ',' + std::string(to_string(r.residue_method)) + ',';
    out += num(r.forward_pole_err) + ',' + num(r.forward_residue_err) + ',' + num(r.euler_jacobi_defect) + ',' +
           num(r.backward_err) + ',' + num(r.min_pole_gap) + ',' + detail::format_double(r.timing_poles) + ',';
    out += '"' + flags + "\",";
    out += (r.seed ? std::to_string(*r.seed) : std::string()) + ',' + '"' + r.source + '"';
    return out;
}

/// Median wall-clock seconds of `work` over `repetitions` runs.
inline double median_seconds(const std::function<void()>& work, int repetitions) {
    std::vector<double> times;
    for (int i = 0; i < std::max(1, repetitions); ++i) {
        auto start = std::chrono::steady_clock::now();
        work();
        times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t m = times.size();
    return m % 2 == 1 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
}

struct EvaluateOptions {
    int repetitions = 5;
    bool forward_errors = true;
    bool timing_only = false;
};

namespace detail {

inline std::string failure_flag(std::string_view stage, const std::exception& e) {
    if (auto* err = dynamic_cast<const Error*>(&e)) return std::string(stage) + "_failed:" + std::string(to_string(err->kind()));
    return std::string(stage) + "_failed:" + e.what();
}

} // namespace detail

/// All metrics for one signal, order and method combination. Failures become
/// flags; the corresponding metrics stay empty.
inline ErrorReport evaluate(const Signal& signal, std::size_t n, Variant variant, PoleMethod pole_method,
                            ResidueMethod residue_method, const EvaluateOptions& eo = {}) {
    ErrorReport r;
    r.n = n;
    r.variant = variant;
    r.pole_method = pole_method;
    r.residue_method = residue_method;
    try {
        r.timing_poles = median_seconds([&] { (void)compute_poles(signal, n, variant, pole_method); }, eo.repetitions);
    } catch (const std::exception& e) {
        r.flags.push_back(detail::failure_flag("poles", e));
        return r;
    }
    if (eo.timing_only) return r;
    AnalysisOptions opt;
    opt.variant = variant;
    opt.pole_method = pole_method;
    opt.residue_method = residue_method;
    PadeModel model;
    try {
        model = analyze(signal, n, opt);
    } catch (const std::exception& e) {
        r.flags.push_back(detail::failure_flag("analysis", e));
        return r;
    }
    r.flags.insert(r.flags.end(), model.flags.begin(), model.flags.end());
    r.min_pole_gap = model.min_pole_gap;
    if (!model.residues) return r;
    auto attempt = [&](std::string_view stage, std::optional<double>& slot, auto&& fn) {
        try {
            slot = fn();
        } catch (const std::exception& e) {
            r.flags.push_back(detail::failure_flag(stage, e));
        }
    };
    attempt("euler_jacobi", r.euler_jacobi_defect, [&] { return euler_jacobi_defect(model); });
    attempt("backward", r.backward_err, [&] { return backward_error(signal, model); });
    if (eo.forward_errors) {
        attempt("forward_poles", r.forward_pole_err, [&] { return forward_pole_error(model, pole_method); });
        attempt("forward_residues", r.forward_residue_err,
                [&] { return forward_residue_error(model, residue_method, pole_method); });
    }
    return r;
}

struct CorpusEntry {
    std::string name;
    Signal signal;
    /// 0 selects the automatic order.
    std::size_t n = 0;
};

struct SweepConfig {
    std::vector<std::size_t> n_list;
    std::vector<std::uint64_t> seeds;
    Variant variant = Variant::SubDiagonal;
    std::vector<PoleMethod> pole_methods{PoleMethod::JMatrix};
    std::vector<ResidueMethod> residue_methods{ResidueMethod::VandermondeFull};
    int repetitions = 5;
    unsigned jobs = 1;
    bool forward_errors = true;
    bool timing_only = false;
    std::vector<CorpusEntry> corpus;
};

/// Runs every (n, seed, pole method, residue method) point on white noise,
/// then every corpus signal. Reports come back in config order regardless
/// of the number of worker threads.
inline std::vector<ErrorReport> sweep(const SweepConfig& config) {
    if (config.n_list.empty() && config.corpus.empty())
        throw Error(ErrorKind::InvalidArgument, "sweep needs a non-empty n_list or corpus");
    if (!config.n_list.empty() && config.seeds.empty())
        throw Error(ErrorKind::InvalidArgument, "sweep needs at least one seed");
    if (config.pole_methods.empty() || config.residue_methods.empty())
        throw Error(ErrorKind::InvalidArgument, "sweep needs at least one pole and residue method");
    for (auto n : config.n_list)
        if (n == 0) throw Error(ErrorKind::InvalidArgument, "n_list entries must be >= 1");

    struct Job {
        const Signal* signal;
        std::size_t n;
        PoleMethod pole;
        ResidueMethod residue;
        std::optional<std::uint64_t> seed;
        std::string source;
        std::size_t signal_slot;
    };
    std::vector<Job> jobs;
    const std::string noise_source = "white_noise:" + std::string(rng_algorithm);
    // white-noise signals are generated once per (n, seed)
    std::vector<std::pair<std::size_t, std::uint64_t>> keys;
    for (auto n : config.n_list)
        for (auto seed : config.seeds) keys.emplace_back(n, seed);
    std::vector<std::optional<Signal>> noise(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        for (auto p : config.pole_methods)
            for (auto r : config.residue_methods)
                jobs.push_back({nullptr, keys[i].first, p, r, keys[i].second, noise_source, i});
    for (const auto& entry : config.corpus) {
        std::size_t n = entry.n != 0 ? entry.n : auto_order(entry.signal.size(), config.variant);
        for (auto p : config.pole_methods)
            for (auto r : config.residue_methods) jobs.push_back({&entry.signal, n, p, r, std::nullopt, entry.name, 0});
    }
    for (std::size_t i = 0; i < keys.size(); ++i) noise[i] = white_noise(keys[i].first, keys[i].second);

    EvaluateOptions eo;
    eo.repetitions = config.repetitions;
    eo.forward_errors = config.forward_errors;
    eo.timing_only = config.timing_only;
    std::vector<ErrorReport> reports(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            const Signal& s = job.signal ? *job.signal : *noise[job.signal_slot];
            ErrorReport r;
            try {
                if (job.n == 0 || s.size() < required_length(job.n, config.variant))
                    throw Error(ErrorKind::InvalidLength, "signal too short for the requested order");
                r = evaluate(s, job.n, config.variant, job.pole, job.residue, eo);
            } catch (const std::exception& e) {
                r.n = job.n;
                r.variant = config.variant;
                r.pole_method = job.pole;
                r.residue_method = job.residue;
                r.flags.push_back(detail::failure_flag("run", e));
            }
            r.seed = job.seed;
            r.source = job.source;
            reports[i] = std::move(r);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(jobs.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return reports;
}

} // namespace pade

#endif // PADE_DIAGNOSTICS_HPP
