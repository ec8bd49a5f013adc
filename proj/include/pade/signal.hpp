#ifndef PADE_SIGNAL_HPP
#define PADE_SIGNAL_HPP

#include "pade/core.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace pade {

/// Finite complex sequence s_0 .. s_{N-1}, N >= 2, all samples finite.
class Signal {
  public:
    Signal() = default;

    explicit Signal(ComplexVector samples) : samples_(std::move(samples)) {
        if (samples_.size() < 2)
            throw Error(ErrorKind::InvalidLength,
                        "signal needs at least 2 samples, got " + std::to_string(samples_.size()));
        for (std::size_t k = 0; k < samples_.size(); ++k)
            if (!is_finite(samples_[k]))
                throw Error(ErrorKind::Validation, "sample " + std::to_string(k) + " is not finite",
                            static_cast<long>(k));
    }

    std::size_t size() const noexcept { return samples_.size(); }
    const Complex& operator[](std::size_t k) const { return samples_[k]; }
    std::span<const Complex> samples() const noexcept { return samples_; }

    /// Largest order the given variant can be analysed at with this length.
    std::size_t max_order(Variant v) const noexcept {
        return v == Variant::SubDiagonal ? size() / 2 : (size() - 1) / 2;
    }

    Signal scaled(Complex alpha) const {
        ComplexVector out(samples_);
        for (auto& z : out) z *= alpha;
        return Signal(std::move(out));
    }

    friend bool operator==(const Signal&, const Signal&) = default;

  private:
    ComplexVector samples_;
};

/// Name of the generator used by white_noise(); recorded in sweep reports.
inline constexpr std::string_view rng_algorithm = "mt19937_64/box-muller";

/// Complex Gaussian white noise of length 2n. Real and imaginary parts are
/// independent N(0, 1) draws, so each sample has total variance 2.
inline Signal white_noise(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorKind::InvalidLength, "white noise order must be >= 1");
    std::mt19937_64 engine(seed);
    // 53-bit uniform in (0, 1); avoids the implementation-defined std distributions
    auto uniform = [&engine] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };
    ComplexVector out(2 * n);
    for (auto& z : out) {
        double radius = std::sqrt(-2.0 * std::log(uniform()));
        double angle = 2.0 * std::numbers::pi * uniform();
        z = Complex(radius * std::cos(angle), radius * std::sin(angle));
    }
    return Signal(std::move(out));
}

/// Parameters of a finite sum of damped oscillations
///   s_k = sum_p A_p exp(i gamma_p k),  gamma_p = (2 pi f_p + i b_p) T / N.
struct OscillationParams {
    ComplexVector amplitudes;
    std::vector<double> frequencies;
    std::vector<double> dampings;
    double total_time = 1.0;
    std::size_t length = 0;

    void validate() const {
        std::size_t count = amplitudes.size();
        if (count == 0) throw Error(ErrorKind::InvalidArgument, "at least one oscillation is required");
        if (frequencies.size() != count || dampings.size() != count)
            throw Error(ErrorKind::InvalidArgument,
                        "amplitude, frequency and damping lists must have equal length");
        if (length < 2) throw Error(ErrorKind::InvalidLength, "signal length must be >= 2");
        if (!(total_time > 0.0) || !std::isfinite(total_time))
            throw Error(ErrorKind::InvalidArgument, "total time must be positive");
        for (std::size_t p = 0; p < count; ++p)
            if (!(dampings[p] > 0.0))
                throw Error(ErrorKind::InvalidDamping,
                            "damping b_" + std::to_string(p) + " must be > 0", static_cast<long>(p));
    }

    Complex rate(std::size_t p) const {
        Complex omega(2.0 * std::numbers::pi * frequencies[p], dampings[p]);
        return omega * (total_time / static_cast<double>(length));
    }
};

inline Signal damped_signal(const OscillationParams& params) {
    params.validate();
    ComplexVector out(params.length, Complex(0.0));
    const Complex i(0.0, 1.0);
    for (std::size_t p = 0; p < params.amplitudes.size(); ++p) {
        Complex gamma = params.rate(p);
        for (std::size_t k = 0; k < params.length; ++k)
            out[k] += params.amplitudes[p] * std::exp(i * gamma * static_cast<double>(k));
    }
    return Signal(std::move(out));
}

/// s_k = sum_p A_p q_p^k with the ratios q_p = exp(i gamma_p) given directly.
/// Powers are formed by repeated multiplication, so integer data stays exact.
inline Signal geometric_signal(std::span<const Complex> amplitudes, std::span<const Complex> ratios,
                               std::size_t length) {
    if (amplitudes.empty() || amplitudes.size() != ratios.size())
        throw Error(ErrorKind::InvalidArgument, "amplitudes and ratios must be non-empty and of equal length");
    ComplexVector out(length, Complex(0.0));
    for (std::size_t p = 0; p < amplitudes.size(); ++p) {
        Complex power(1.0);
        for (std::size_t k = 0; k < length; ++k) {
            out[k] += amplitudes[p] * power;
            power *= ratios[p];
        }
    }
    return Signal(std::move(out));
}

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

inline bool has_suffix(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace detail

/// CSV body: one `re,im` line per sample, 17 significant digits.
inline std::string to_csv(const Signal& signal) {
    std::string out;
    for (auto z : signal.samples()) {
        out += detail::format_double(z.real());
        out += ',';
        out += detail::format_double(z.imag());
        out += '\n';
    }
    return out;
}

/// Parses the CSV format. Lines starting with '#' and blank lines are skipped;
/// line numbers in errors are 1-based.
inline Signal parse_csv(std::istream& in) {
    ComplexVector samples;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto comma = view.find(',');
        double re = 0.0, im = 0.0;
        bool ok = comma != std::string_view::npos && detail::parse_double(view.substr(0, comma), re) &&
                  detail::parse_double(view.substr(comma + 1), im);
        if (!ok)
            throw Error(ErrorKind::Parse, "malformed sample at line " + std::to_string(line_no) + ": '" + line + "'",
                        line_no);
        if (!std::isfinite(re) || !std::isfinite(im))
            throw Error(ErrorKind::Validation, "non-finite sample at line " + std::to_string(line_no), line_no);
        samples.emplace_back(re, im);
    }
    return Signal(std::move(samples));
}

inline nlohmann::json to_json(const Signal& signal) {
    nlohmann::json samples = nlohmann::json::array();
    for (auto z : signal.samples()) samples.push_back({z.real(), z.imag()});
    return {{"samples", samples}};
}

inline Signal signal_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array())
        throw Error(ErrorKind::Parse, "expected an object with a 'samples' array");
    ComplexVector samples;
    long index = 0;
    for (const auto& item : doc["samples"]) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
            throw Error(ErrorKind::Parse, "sample " + std::to_string(index) + " is not a [re, im] pair", index);
        samples.emplace_back(item[0].get<double>(), item[1].get<double>());
        ++index;
    }
    return Signal(std::move(samples));
}

/// Reads CSV, or the JSON mirror format when the path ends in ".json".
inline Signal read_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    if (detail::has_suffix(path, ".json")) {
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, "invalid JSON in '" + path + "': " + e.what());
        }
        return signal_from_json(doc);
    }
    return parse_csv(in);
}

inline void write_signal(const Signal& signal, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    if (detail::has_suffix(path, ".json"))
        out << to_json(signal).dump() << '\n';
    else
        out << to_csv(signal);
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

} // namespace pade

#endif // PADE_SIGNAL_HPP
