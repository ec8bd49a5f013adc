#include "pade/pade.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_degenerate = 2;
constexpr int exit_error = 3;

json to_pair(pade::Complex z) { return json::array({z.real(), z.imag()}); }

json to_pairs(std::span<const pade::Complex> v) {
    json out = json::array();
    for (auto z : v) out.push_back(to_pair(z));
    return out;
}

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json error_object(const std::exception& e) {
    json err{{"message", e.what()}};
    if (auto* pe = dynamic_cast<const pade::Error*>(&e)) {
        err["kind"] = std::string(pade::to_string(pe->kind()));
        if (pe->index()) err["index"] = *pe->index();
        if (pe->index_end()) err["index_end"] = *pe->index_end();
    } else if (dynamic_cast<const json::exception*>(&e)) {
        err["kind"] = "validation";
    } else {
        err["kind"] = "internal";
    }
    return json{{"error", err}};
}

/// "re" or "re,im".
pade::Complex parse_complex(const std::string& text) {
    auto comma = text.find(',');
    double re = 0.0;
    double im = 0.0;
    auto fail = [&] { throw pade::Error(pade::ErrorKind::Parse, "cannot parse complex value '" + text + "'"); };
    if (!pade::detail::parse_double(text.substr(0, comma), re)) fail();
    if (comma != std::string::npos && !pade::detail::parse_double(text.substr(comma + 1), im)) fail();
    return {re, im};
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw pade::Error(pade::ErrorKind::Io, "cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

  private:
    std::ofstream file_;
};

struct SynthArgs {
    std::string kind;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> amps;
    std::vector<std::string> poles;
    std::vector<double> freqs;
    std::vector<double> dampings;
    double total_time = 1.0;
    std::size_t length = 0;
    double sigma = 0.0;
    std::string out;
};

pade::Signal synth_damped(const SynthArgs& a) {
    pade::ComplexVector amps;
    for (const auto& s : a.amps) amps.push_back(parse_complex(s));
    if (!a.poles.empty()) {
        if (!a.freqs.empty() || !a.dampings.empty())
            throw pade::Error(pade::ErrorKind::InvalidArgument, "use either --pole or --freq/--damping, not both");
        pade::ComplexVector ratios;
        for (const auto& s : a.poles) ratios.push_back(parse_complex(s));
        if (a.length < 2) throw pade::Error(pade::ErrorKind::InvalidLength, "--len must be >= 2");
        return pade::geometric_signal(amps, ratios, a.length);
    }
    pade::OscillationParams p;
    p.amplitudes = amps;
    p.frequencies = a.freqs;
    p.dampings = a.dampings;
    p.total_time = a.total_time;
    p.length = a.length;
    // a single shared frequency or damping applies to every amplitude
    if (p.frequencies.empty()) p.frequencies.assign(amps.size(), 0.0);
    if (p.frequencies.size() == 1) p.frequencies.assign(amps.size(), p.frequencies[0]);
    if (p.dampings.size() == 1) p.dampings.assign(amps.size(), p.dampings[0]);
    return pade::damped_signal(p);
}

int cmd_synth(const SynthArgs& a) {
    pade::Signal s = [&] {
        if (a.kind == "white") return pade::white_noise(a.n, a.seed);
        if (a.kind == "damped") return synth_damped(a);
        if (a.kind == "mixed") {
            pade::Signal clean = synth_damped(a);
            if (!(a.sigma >= 0.0)) throw pade::Error(pade::ErrorKind::InvalidArgument, "--sigma must be >= 0");
            pade::Signal noise = pade::white_noise((clean.size() + 1) / 2, a.seed);
            pade::ComplexVector out(clean.size());
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = clean[k] + a.sigma * noise[k];
            return pade::Signal(std::move(out));
        }
        throw pade::Error(pade::ErrorKind::InvalidArgument, "unknown synth kind '" + a.kind + "'");
    }();
    if (a.kind != "damped") std::cerr << "seed=" << a.seed << " rng=" << pade::rng_algorithm << '\n';
    if (a.out.empty() || a.out == "-") std::cout << pade::to_csv(s);
    else pade::write_signal(s, a.out);
    return exit_ok;
}

struct AnalyzeArgs {
    std::string input;
    std::string order = "auto";
    std::string variant = "sub";
    std::string pole_method = "jmatrix";
    std::string residue_method = "vandermonde-full";
    std::string out;
    std::string format = "json";
    double tol = pade::default_simplicity_tol;
    double tau = 0.0;
    bool normal_equations = false;
};

std::size_t resolve_order(const std::string& order, std::size_t length, pade::Variant variant) {
    if (order == "auto") {
        std::size_t n = pade::auto_order(length, variant);
        if (n == 0) throw pade::Error(pade::ErrorKind::InvalidLength, "signal too short for any order");
        return n;
    }
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(order.data(), order.data() + order.size(), n);
    if (ec != std::errc() || ptr != order.data() + order.size() || n == 0)
        throw pade::Error(pade::ErrorKind::InvalidArgument, "--n must be a positive integer or 'auto'");
    return n;
}

json model_report(const pade::Signal& signal, const pade::PadeModel& m) {
    json metrics = json::object();
    metrics["min_pole_gap"] = number_or_null(m.min_pole_gap);
    std::vector<std::string> flags = m.flags;
    auto attempt = [&](const char* name, auto&& fn) {
        try {
            metrics[name] = number_or_null(fn());
        } catch (const std::exception& e) {
            metrics[name] = nullptr;
            flags.push_back(std::string(name) + "_failed:" + e.what());
        }
    };
    if (m.residues) {
        attempt("euler_jacobi_defect", [&] { return pade::euler_jacobi_defect(m); });
        attempt("backward_err", [&] { return pade::backward_error(signal, m); });
    } else {
        metrics["euler_jacobi_defect"] = nullptr;
        metrics["backward_err"] = nullptr;
    }
    json report{{"schema", 1},
                {"variant", std::string(pade::to_string(m.variant))},
                {"n", m.order},
                {"pole_method", std::string(pade::to_string(m.pole_method))},
                {"residue_method", m.residue_method ? json(std::string(pade::to_string(*m.residue_method))) : json(nullptr)},
                {"s0", to_pair(m.s0)},
                {"poles", to_pairs(m.poles)},
                {"zeros", m.zeros ? to_pairs(*m.zeros) : json(nullptr)},
                {"residues", m.residues ? to_pairs(*m.residues) : json(nullptr)},
                {"min_pole_gap", number_or_null(m.min_pole_gap)},
                {"metrics", metrics},
                {"flags", flags}};
    return report;
}

void write_model_csv(std::ostream& os, const json& report) {
    os << "kind,index,re,im\n";
    auto rows = [&](const char* kind, const json& values) {
        if (!values.is_array()) return;
        for (std::size_t i = 0; i < values.size(); ++i)
            os << kind << ',' << i << ',' << pade::detail::format_double(values[i][0].get<double>()) << ','
               << pade::detail::format_double(values[i][1].get<double>()) << '\n';
    };
    rows("s0", json::array({report["s0"]}));
    rows("pole", report["poles"]);
    rows("zero", report["zeros"]);
    rows("residue", report["residues"]);
    for (auto& [name, value] : report["metrics"].items())
        os << "metric," << name << ',' << (value.is_number() ? pade::detail::format_double(value.get<double>()) : value.dump()) << ",\n";
    for (const auto& f : report["flags"]) os << "flag," << f.get<std::string>() << ",,\n";
}

int cmd_analyze(const AnalyzeArgs& a) {
    if (a.format != "json" && a.format != "csv")
        throw pade::Error(pade::ErrorKind::InvalidArgument, "--format must be json or csv");
    pade::Signal signal = pade::read_signal(a.input);
    pade::AnalysisOptions opt;
    opt.variant = pade::parse_variant(a.variant);
    opt.pole_method = pade::parse_pole_method(a.pole_method);
    opt.residue_method = pade::parse_residue_method(a.residue_method);
    opt.simplicity_tol = a.tol;
    opt.tau = a.tau;
    opt.normal_equations = a.normal_equations;
    std::size_t n = resolve_order(a.order, signal.size(), opt.variant);
    pade::PadeModel model = pade::analyze(signal, n, opt);
    json report = model_report(signal, model);
    Output out(a.out);
    if (a.format == "json")
        out.stream() << report.dump(2) << '\n';
    else
        write_model_csv(out.stream(), report);
    return model.degenerate() ? exit_degenerate : exit_ok;
}

struct ValidateArgs {
    std::string input;
    std::string order = "auto";
    std::string variant = "sub";
    std::vector<std::string> pole_methods{"jmatrix"};
    std::vector<std::string> residue_methods;
    std::string out;
};

std::string cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", *v);
    return buf;
}

int cmd_validate(const ValidateArgs& a) {
    pade::Signal signal = pade::read_signal(a.input);
    pade::Variant variant = pade::parse_variant(a.variant);
    std::size_t n = resolve_order(a.order, signal.size(), variant);
    if (signal.size() < pade::required_length(n, variant))
        throw pade::Error(pade::ErrorKind::InvalidLength, "signal too short for order " + std::to_string(n));
    std::vector<pade::ResidueMethod> residue_methods;
    if (a.residue_methods.empty()) {
        for (auto m : pade::all_residue_methods) residue_methods.push_back(m);
    } else {
        for (const auto& m : a.residue_methods) residue_methods.push_back(pade::parse_residue_method(m));
    }
    Output out(a.out);
    auto& os = out.stream();
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-19s %-11s %-11s %-11s %-11s %-11s %s\n", "poles", "residues", "euler_jac",
                  "backward", "fwd_pole", "fwd_resid", "bound_frac", "flags");
    os << line;
    bool degenerate = false;
    for (const auto& pm_name : a.pole_methods) {
        pade::PoleMethod pm = pade::parse_pole_method(pm_name);
        for (auto rm : residue_methods) {
            pade::ErrorReport r = pade::evaluate(signal, n, variant, pm, rm, {1, true, false});
            std::optional<double> bound;
            try {
                pade::AnalysisOptions opt;
                opt.variant = variant;
                opt.pole_method = pm;
                opt.residue_method = rm;
                pade::PadeModel m = pade::analyze(signal, n, opt);
                if (m.residues) bound = pade::residue_radius_profile(m, std::nullopt, &signal).fraction_within_sigma();
            } catch (const std::exception&) {
            }
            std::string flags;
            for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
            for (const auto& f : r.flags)
                if (f == "degenerate_spectrum") degenerate = true;
            std::snprintf(line, sizeof line, "%-8s %-19s %-11s %-11s %-11s %-11s %-11s %s\n",
                          std::string(pade::to_string(pm)).c_str(), std::string(pade::to_string(rm)).c_str(),
                          cell(r.euler_jacobi_defect).c_str(), cell(r.backward_err).c_str(),
                          cell(r.forward_pole_err).c_str(), cell(r.forward_residue_err).c_str(), cell(bound).c_str(),
                          flags.c_str());
            os << line;
        }
    }
    return degenerate ? exit_degenerate : exit_ok;
}

template <class T>
std::vector<T> read_list(const json& doc, const char* key, T (*parse)(std::string_view), std::vector<T> fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_array()) throw pade::Error(pade::ErrorKind::Validation, std::string("'") + key + "' must be an array");
    std::vector<T> out;
    for (const auto& item : v) {
        if (!item.is_string())
            throw pade::Error(pade::ErrorKind::Validation, std::string("'") + key + "' entries must be strings");
        out.push_back(parse(item.get<std::string>()));
    }
    return out;
}

pade::SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pade::Error(pade::ErrorKind::Io, "cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw pade::Error(pade::ErrorKind::Parse, std::string("invalid JSON config: ") + e.what());
    }
    if (!doc.is_object()) throw pade::Error(pade::ErrorKind::Validation, "config must be a JSON object");
    static const std::set<std::string> known{"n_list",  "seeds", "variant",     "pole_methods", "residue_methods",
                                             "repetitions", "jobs", "forward_errors", "corpus"};
    for (auto& [key, _] : doc.items())
        if (!known.count(key)) throw pade::Error(pade::ErrorKind::Validation, "unknown config key '" + key + "'");
    if (!doc.contains("n_list") || !doc["n_list"].is_array())
        throw pade::Error(pade::ErrorKind::Validation, "'n_list' must be an array");
    pade::SweepConfig c;
    for (const auto& v : doc["n_list"]) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
            throw pade::Error(pade::ErrorKind::Validation, "'n_list' entries must be positive integers");
        c.n_list.push_back(v.get<std::size_t>());
    }
    if (c.n_list.empty()) throw pade::Error(pade::ErrorKind::Validation, "'n_list' is empty");
    if (doc.contains("seeds")) {
        if (!doc["seeds"].is_array()) throw pade::Error(pade::ErrorKind::Validation, "'seeds' must be an array");
        for (const auto& v : doc["seeds"]) {
            if (!v.is_number_unsigned())
                throw pade::Error(pade::ErrorKind::Validation, "'seeds' entries must be non-negative integers");
            c.seeds.push_back(v.get<std::uint64_t>());
        }
    } else {
        c.seeds = {1};
    }
    if (doc.contains("variant")) {
        if (!doc["variant"].is_string()) throw pade::Error(pade::ErrorKind::Validation, "'variant' must be a string");
        c.variant = pade::parse_variant(doc["variant"].get<std::string>());
    }
    c.pole_methods = read_list<pade::PoleMethod>(doc, "pole_methods", pade::parse_pole_method, c.pole_methods);
    c.residue_methods =
        read_list<pade::ResidueMethod>(doc, "residue_methods", pade::parse_residue_method, c.residue_methods);
    if (doc.contains("repetitions")) {
        if (!doc["repetitions"].is_number_unsigned() || doc["repetitions"].get<int>() < 1)
            throw pade::Error(pade::ErrorKind::Validation, "'repetitions' must be a positive integer");
        c.repetitions = doc["repetitions"].get<int>();
    }
    if (doc.contains("jobs")) {
        if (!doc["jobs"].is_number_unsigned() || doc["jobs"].get<unsigned>() < 1)
            throw pade::Error(pade::ErrorKind::Validation, "'jobs' must be a positive integer");
        c.jobs = doc["jobs"].get<unsigned>();
    }
    if (doc.contains("forward_errors")) {
        if (!doc["forward_errors"].is_boolean())
            throw pade::Error(pade::ErrorKind::Validation, "'forward_errors' must be a boolean");
        c.forward_errors = doc["forward_errors"].get<bool>();
    }
    if (doc.contains("corpus")) {
        if (!doc["corpus"].is_array()) throw pade::Error(pade::ErrorKind::Validation, "'corpus' must be an array");
        for (const auto& item : doc["corpus"]) {
            if (!item.is_object()) throw pade::Error(pade::ErrorKind::Validation, "corpus entries must be objects");
            pade::CorpusEntry e{"", pade::Signal(pade::ComplexVector{1.0, 1.0}), 0};
            if (item.contains("path")) {
                e.name = item["path"].get<std::string>();
                e.signal = pade::read_signal(e.name);
            } else if (item.contains("samples")) {
                e.signal = pade::signal_from_json(item);
                e.name = "inline";
            } else {
                throw pade::Error(pade::ErrorKind::Validation, "corpus entries need 'path' or 'samples'");
            }
            if (item.contains("name")) e.name = item["name"].get<std::string>();
            if (item.contains("n")) e.n = item["n"].get<std::size_t>();
            c.corpus.push_back(std::move(e));
        }
    }
    return c;
}

int cmd_sweep(const std::string& config_path, std::optional<unsigned> jobs, const std::string& out_path, bool bench) {
    pade::SweepConfig c = load_sweep_config(config_path);
    if (jobs) c.jobs = *jobs;
    if (bench) {
        c.timing_only = true;
        c.residue_methods = {pade::ResidueMethod::VandermondeFull};
    }
    auto reports = pade::sweep(c);
    Output out(out_path);
    for (const auto& r : reports) {
        json row = pade::to_json(r);
        if (bench)
            row = json{{"n", row["n"]},         {"variant", row["variant"]}, {"pole_method", row["pole_method"]},
                       {"seed", row["seed"]},   {"source", row["source"]},   {"timing_poles", row["timing_poles"]},
                       {"flags", row["flags"]}};
        out.stream() << row.dump() << '\n';
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pade approximants of finite complex sequences: poles, zeros, residues and error diagnostics"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic signal");
    synth_cmd->add_option("kind", synth.kind, "white | damped | mixed")->required()->check(
        CLI::IsMember({"white", "damped", "mixed"}));
    synth_cmd->add_option("--n", synth.n, "white noise order (2n samples)");
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--amp", synth.amps, "amplitude, 're' or 're,im' (repeatable)");
    synth_cmd->add_option("--pole", synth.poles, "ratio exp(i gamma), 're' or 're,im' (repeatable)");
    synth_cmd->add_option("--freq", synth.freqs, "frequency f_p (repeatable)");
    synth_cmd->add_option("--damping", synth.dampings, "damping b_p > 0 (repeatable)");
    synth_cmd->add_option("--time", synth.total_time, "total time T");
    synth_cmd->add_option("--len", synth.length, "number of samples");
    synth_cmd->add_option("--sigma", synth.sigma, "noise scale for 'mixed'");
    synth_cmd->add_option("--out", synth.out, "output file (.csv or .json); stdout if omitted");

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "poles, zeros and residues of one signal");
    analyze_cmd->add_option("--input", analyze.input, "signal file")->required();
    analyze_cmd->add_option("--n", analyze.order, "order or 'auto'");
    analyze_cmd->add_option("--variant", analyze.variant, "sub | diag");
    analyze_cmd->add_option("--pole-method", analyze.pole_method, "jmatrix | pencil");
    analyze_cmd->add_option("--residue-method", analyze.residue_method,
                            "product | derivative | eigenvector | vandermonde-full | vandermonde-square | perturbation");
    analyze_cmd->add_option("--tol", analyze.tol, "relative pole simplicity tolerance");
    analyze_cmd->add_option("--tau", analyze.tau, "perturbation size (0 = default)");
    analyze_cmd->add_flag("--normal-equations", analyze.normal_equations, "solve the Vandermonde system via normal equations");
    analyze_cmd->add_option("--out", analyze.out, "report file; stdout if omitted");
    analyze_cmd->add_option("--format", analyze.format, "json | csv");

    ValidateArgs validate;
    auto* validate_cmd = app.add_subcommand("validate", "error diagnostics table for one signal");
    validate_cmd->add_option("--input", validate.input, "signal file")->required();
    validate_cmd->add_option("--n", validate.order, "order or 'auto'");
    validate_cmd->add_option("--variant", validate.variant, "sub | diag");
    validate_cmd->add_option("--pole-method", validate.pole_methods, "pole method (repeatable)");
    validate_cmd->add_option("--residue-method", validate.residue_methods, "residue method (repeatable; default all)");
    validate_cmd->add_option("--out", validate.out, "output file; stdout if omitted");

    std::string config_path;
    std::string sweep_out;
    std::optional<unsigned> jobs;
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo error sweep (JSON lines)");
    auto* bench_cmd = app.add_subcommand("bench", "pole timing sweep (JSON lines)");
    for (auto* cmd : {sweep_cmd, bench_cmd}) {
        cmd->add_option("--config", config_path, "JSON config")->required();
        cmd->add_option("--jobs", jobs, "worker threads");
        cmd->add_option("--out", sweep_out, "output file; stdout if omitted");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*analyze_cmd) return cmd_analyze(analyze);
        if (*validate_cmd) return cmd_validate(validate);
        if (*sweep_cmd) return cmd_sweep(config_path, jobs, sweep_out, false);
        if (*bench_cmd) return cmd_sweep(config_path, jobs, sweep_out, true);
    } catch (const std::exception& e) {
        std::cout << error_object(e).dump() << '\n';
        return exit_error;
    }
    return exit_error;
}
