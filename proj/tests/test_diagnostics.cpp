#include "pade/diagnostics.hpp"

#include <gtest/gtest.h>

using namespace pade;

namespace {

Signal real_signal(std::initializer_list<double> v) {
    ComplexVector out;
    for (double x : v) out.emplace_back(x, 0.0);
    return Signal(std::move(out));
}

const Signal worked = real_signal({4, 5, 13, 23});

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Numeric;
}

PadeModel model_with(const Signal& s, std::size_t n, ResidueMethod m, Variant v = Variant::SubDiagonal) {
    AnalysisOptions opt;
    opt.variant = v;
    opt.residue_method = m;
    return analyze(s, n, opt);
}

bool same_bits(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || std::bit_cast<std::uint64_t>(*a) == std::bit_cast<std::uint64_t>(*b);
}

} // namespace

TEST(Reconstruct, GeometricOracle) {
    const ComplexVector poles{2.0, -1.0}, rho{6.0, -1.0};
    Signal s = reconstruct_signal(poles, rho, 4);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(s[k] - worked[k]), 0.0, 1e-13);
}

TEST(Reconstruct, ConstantSignal) {
    const ComplexVector poles{1.0}, rho{1.0};
    Signal s = reconstruct_signal(poles, rho, 3);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(s[k], Complex(1.0));
}

TEST(Reconstruct, ZeroPoleRejected) {
    const ComplexVector poles{0.0}, rho{1.0};
    EXPECT_EQ(kind_of([&] { reconstruct_signal(poles, rho, 3); }), ErrorKind::ZeroPole);
}

TEST(Reconstruct, LargePoleWithTinyResidueStaysFinite) {
    // 10^-300 * 100^{k-1} is representable for every k below
    const ComplexVector poles{100.0}, rho{1e-300};
    Signal s = reconstruct_signal(poles, rho, 150);
    EXPECT_NEAR(s[149].real() / 1e-4, 1.0, 1e-10);
}

TEST(Reconstruct, OverflowNamesPole) {
    const ComplexVector poles{0.5, 1e10}, rho{1.0, 1e200};
    try {
        reconstruct_signal(poles, rho, 40);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Overflow);
        EXPECT_EQ(*e.index(), 1);
    }
}

TEST(ForwardError, WorkedExample) {
    for (PoleMethod pm : {PoleMethod::JMatrix, PoleMethod::Pencil}) {
        PadeModel m = model_with(worked, 2, ResidueMethod::VandermondeFull);
        EXPECT_LT(forward_pole_error(m, pm), 1e-12) << to_string(pm);
        EXPECT_LT(forward_residue_error(m, ResidueMethod::VandermondeFull, pm), 1e-12) << to_string(pm);
    }
}

TEST(ForwardError, ConstantSignalOrderOne) {
    PadeModel m = model_with(real_signal({1, 1}), 1, ResidueMethod::VandermondeFull);
    EXPECT_LT(forward_pole_error(m, PoleMethod::JMatrix), 1e-15);
    EXPECT_LT(forward_residue_error(m, ResidueMethod::VandermondeFull, PoleMethod::JMatrix), 1e-15);
}

TEST(ForwardError, SmallOnWhiteNoise) {
    for (PoleMethod pm : {PoleMethod::JMatrix, PoleMethod::Pencil}) {
        PadeModel m = model_with(white_noise(40, 2), 40, ResidueMethod::VandermondeFull);
        EXPECT_LT(forward_pole_error(m, pm), 1e-8) << to_string(pm);
    }
}

TEST(EulerJacobi, WorkedExample) {
    for (ResidueMethod rm : all_residue_methods) {
        PadeModel m = model_with(worked, 2, rm);
        double tol = rm == ResidueMethod::Perturbation ? 1e-6 : 1e-14;
        EXPECT_LT(euler_jacobi_defect(m), tol) << to_string(rm);
    }
}

TEST(EulerJacobi, ConstantSignal) {
    EXPECT_EQ(euler_jacobi_defect(model_with(real_signal({1, 1}), 1, ResidueMethod::Product)), 0.0);
    PadeModel m = model_with(real_signal({1, 1}), 1, ResidueMethod::VandermondeFull);
    EXPECT_LE(euler_jacobi_defect(m), 2 * machine_epsilon);
}

TEST(EulerJacobi, DiagonalVariant) {
    ComplexVector amps{3.0, 1.0}, ratios{2.0, -1.0};
    PadeModel m = model_with(geometric_signal(amps, ratios, 5), 2, ResidueMethod::VandermondeFull, Variant::Diagonal);
    EXPECT_LT(euler_jacobi_defect(m), 1e-12);
    PadeModel noise = model_with(white_noise(20, 3), 19, ResidueMethod::VandermondeFull, Variant::Diagonal);
    EXPECT_LT(euler_jacobi_defect(noise), 1e-8);
}

TEST(EulerJacobi, WhiteNoiseVandermondeFull) {
    for (std::size_t n : {16u, 64u, 256u})
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            PadeModel m = model_with(white_noise(n, seed), n, ResidueMethod::VandermondeFull);
            EXPECT_LT(euler_jacobi_defect(m), 1e-6) << "n = " << n << " seed " << seed;
        }
}

TEST(EulerJacobi, ProductOnRationalExamples) {
    // exactly representable signals with simple spectra
    const std::vector<Signal> cases{worked, real_signal({1, 1}), real_signal({3, 1, 4, 1, 5, 9}),
                                    real_signal({2, -1, 0.75, 0.25, -3, 8, 1, 0.125})};
    for (const auto& s : cases) {
        PadeModel m = model_with(s, s.size() / 2, ResidueMethod::Product);
        EXPECT_LT(euler_jacobi_defect(m), 1e-10) << "length " << s.size();
    }
}

TEST(EulerJacobi, ZeroPoleRejected) {
    PadeModel m;
    m.s0 = 1.0;
    m.poles = {0.0};
    m.residues = ComplexVector{1.0};
    EXPECT_EQ(kind_of([&] { euler_jacobi_defect(m); }), ErrorKind::ZeroPole);
}

TEST(BackwardError, WorkedExampleAnyMethod) {
    for (ResidueMethod rm : all_residue_methods) {
        PadeModel m = model_with(worked, 2, rm);
        double tol = rm == ResidueMethod::Perturbation ? 1e-5 : 1e-12;
        EXPECT_LT(backward_error(worked, m), tol) << to_string(rm);
    }
}

TEST(BackwardError, DualityWithLeastSquaresResidual) {
    for (std::size_t n : {8u, 64u, 200u})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            Signal s = white_noise(n, seed);
            AnalysisOptions opt;
            opt.residue_method.reset();
            PadeModel m = analyze(s, n, opt);
            VandermondeSolution sol = residues_vandermonde_full(s, m.poles);
            attach_residues(m, s, std::nullopt, ResidueMethod::VandermondeFull, opt);
            double be = backward_error(s, m);
            EXPECT_LE(std::abs(be - sol.residual), 1e-10 * sol.residual) << "n = " << n << " seed " << seed;
        }
}

TEST(BackwardError, GrowsSlowlyOnWhiteNoise) {
    for (std::size_t n : {50u, 200u}) {
        PadeModel m = model_with(white_noise(n, 1), n, ResidueMethod::VandermondeFull);
        EXPECT_LT(backward_error(white_noise(n, 1), m), 1e-15 * std::pow(static_cast<double>(n), 1.5));
    }
}

TEST(RadiusProfile, AllPolesInside) {
    PadeModel m;
    m.poles = {0.5, Complex(0.0, -0.9)};
    m.residues = ComplexVector{1.0, 2.0};
    RadiusProfile p = residue_radius_profile(m, 1.0);
    EXPECT_EQ(p.outside_count, 0u);
    EXPECT_EQ(p.fraction_within_sigma(), 1.0);
    EXPECT_EQ(p.rows.size(), 2u);
}

TEST(RadiusProfile, BoundRowsAndIntercepts) {
    PadeModel m;
    m.poles = {2.0, -1.5, 0.5};
    m.residues = ComplexVector{std::exp(-3.0), std::exp(-10.0), 1.0};
    RadiusProfile p = residue_radius_profile(m, std::exp(1.0));
    // slope 2(n-1) = 4: c = ln|rho| + 4 delta
    EXPECT_EQ(p.outside_count, 2u);
    EXPECT_NEAR(p.rows[0].bound_rhs, 1.0 - 4.0, 1e-14);
    EXPECT_NEAR(p.envelope_intercept, 1.0, 1e-14);
    EXPECT_NEAR(p.fitted_intercept, (1.0 - 8.0) / 2.0, 1e-14);
    EXPECT_EQ(p.fraction_within(0.0), 0.5);
    EXPECT_EQ(p.fraction_within_sigma(), 1.0);
    EXPECT_NEAR(p.decades_spanned, 10.0 / std::log(10.0), 1e-12);
}

TEST(RadiusProfile, SigmaFromSignal) {
    PadeModel m;
    m.poles = {2.0};
    m.residues = ComplexVector{1.0};
    Signal s = real_signal({3, 4});
    EXPECT_NEAR(residue_radius_profile(m, std::nullopt, &s).sigma, std::sqrt(12.5), 1e-15);
    EXPECT_EQ(kind_of([&] { residue_radius_profile(m); }), ErrorKind::InvalidArgument);
}

TEST(RadiusProfile, HardZerosCountTowardsSpan) {
    PadeModel m;
    m.poles = {2.0, 3.0};
    m.residues = ComplexVector{1.0, 0.0};
    RadiusProfile p = residue_radius_profile(m, 1.0);
    EXPECT_EQ(p.hard_zero_count, 1u);
    EXPECT_NEAR(p.decades_spanned, 324.0, 1e-12);
}

TEST(Evaluate, WorkedExampleReport) {
    ErrorReport r = evaluate(worked, 2, Variant::SubDiagonal, PoleMethod::JMatrix, ResidueMethod::VandermondeFull);
    ASSERT_TRUE(r.forward_pole_err && r.forward_residue_err && r.euler_jacobi_defect && r.backward_err);
    EXPECT_LT(*r.forward_pole_err, 1e-12);
    EXPECT_LT(*r.euler_jacobi_defect, 1e-12);
    EXPECT_GE(r.timing_poles, 0.0);
    EXPECT_NEAR(*r.min_pole_gap, 3.0, 1e-12);
    EXPECT_TRUE(r.flags.empty());
}

TEST(Evaluate, FailuresBecomeFlags) {
    Signal delta = real_signal({1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
    ErrorReport r = evaluate(delta, 8, Variant::SubDiagonal, PoleMethod::JMatrix, ResidueMethod::VandermondeFull);
    ASSERT_EQ(r.flags.size(), 1u);
    EXPECT_EQ(r.flags[0], "poles_failed:leading_sample_zero");
    EXPECT_FALSE(r.backward_err);
}

TEST(Sweep, DeterministicApartFromTiming) {
    SweepConfig c;
    c.n_list = {4, 12};
    c.seeds = {1, 2};
    c.pole_methods = {PoleMethod::JMatrix, PoleMethod::Pencil};
    c.residue_methods = {ResidueMethod::VandermondeFull, ResidueMethod::Product};
    c.repetitions = 1;
    auto a = sweep(c);
    c.jobs = 3;
    auto b = sweep(c);
    ASSERT_EQ(a.size(), 16u);
    ASSERT_EQ(b.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].n, b[i].n);
        EXPECT_EQ(a[i].seed, b[i].seed);
        EXPECT_EQ(a[i].pole_method, b[i].pole_method);
        EXPECT_EQ(a[i].residue_method, b[i].residue_method);
        EXPECT_TRUE(same_bits(a[i].forward_pole_err, b[i].forward_pole_err));
        EXPECT_TRUE(same_bits(a[i].forward_residue_err, b[i].forward_residue_err));
        EXPECT_TRUE(same_bits(a[i].euler_jacobi_defect, b[i].euler_jacobi_defect));
        EXPECT_TRUE(same_bits(a[i].backward_err, b[i].backward_err));
        EXPECT_TRUE(same_bits(a[i].min_pole_gap, b[i].min_pole_gap));
        EXPECT_EQ(a[i].flags, b[i].flags);
    }
    EXPECT_EQ(a[0].n, 4u);
    EXPECT_EQ(*a[0].seed, 1u);
    EXPECT_EQ(a.back().n, 12u);
}

TEST(Sweep, SingleReport) {
    SweepConfig c;
    c.n_list = {6};
    c.seeds = {9};
    c.repetitions = 1;
    auto r = sweep(c);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].source, "white_noise:mt19937_64/box-muller");
}

TEST(Sweep, DegenerateCorpusEntryIsFlagged) {
    SweepConfig c;
    c.n_list = {5};
    c.seeds = {1};
    c.repetitions = 1;
    c.corpus.push_back({"double_pole", real_signal({1, 2, 3, 4}), 0});
    auto r = sweep(c);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[1].source, "double_pole");
    EXPECT_EQ(r[1].n, 2u);
    EXPECT_NE(std::find(r[1].flags.begin(), r[1].flags.end(), "degenerate_spectrum"), r[1].flags.end());
    EXPECT_TRUE(r[0].backward_err.has_value());
}

TEST(Sweep, InvalidConfig) {
    SweepConfig c;
    EXPECT_EQ(kind_of([&] { sweep(c); }), ErrorKind::InvalidArgument);
    c.n_list = {0};
    c.seeds = {1};
    EXPECT_EQ(kind_of([&] { sweep(c); }), ErrorKind::InvalidArgument);
}

TEST(Sweep, ShortCorpusSignalRecordedNotThrown) {
    SweepConfig c;
    c.repetitions = 1;
    c.corpus.push_back({"short", real_signal({1, 2}), 3});
    auto r = sweep(c);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].flags.at(0), "run_failed:invalid_length");
}

TEST(Emitters, CsvColumnsFollowReportOrder) {
    ErrorReport r;
    r.n = 3;
    r.backward_err = 0.5;
    r.flags = {"a", "b"};
    r.seed = 7;
    r.source = "white_noise";
    EXPECT_EQ(csv_header(), "n,variant,pole_method,residue_method,forward_pole_err,forward_residue_err,"
                            "euler_jacobi_defect,backward_err,min_pole_gap,timing_poles,flags,seed,source");
    EXPECT_EQ(to_csv_row(r), "3,sub,jmatrix,vandermonde-full,,,,5.0000000000000000e-01,,0.0000000000000000e+00,\"a;b\",7,"
                            "\"white_noise\"");
}

TEST(Emitters, JsonRoundTrip) {
    ErrorReport r;
    r.n = 10;
    r.forward_pole_err = 1.25e-13;
    r.min_pole_gap = std::numeric_limits<double>::infinity();
    auto j = to_json(r);
    EXPECT_EQ(j["n"], 10);
    EXPECT_EQ(j["forward_pole_err"].get<double>(), 1.25e-13);
    EXPECT_TRUE(j["backward_err"].is_null());
    EXPECT_EQ(j["min_pole_gap"], "inf");
    EXPECT_TRUE(j["seed"].is_null());
    std::size_t keys = 0;
    for (auto it = j.begin(); it != j.end(); ++it) ++keys;
    EXPECT_EQ(keys, std::size(report_columns));
}

TEST(Timing, MedianOfRepetitions) {
    int calls = 0;
    double t = median_seconds([&] { ++calls; }, 5);
    EXPECT_EQ(calls, 5);
    EXPECT_GE(t, 0.0);
}
