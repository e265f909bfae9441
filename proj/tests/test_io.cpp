#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hompr/app/scenario.hpp"
#include "hompr/io/columns.hpp"
#include "hompr/io/keyvalue.hpp"
#include "hompr/io/traces.hpp"
#include "support.hpp"

namespace hompr {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hompr_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string field_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const FieldError& e) {
        return e.field();
    }
    return "<no FieldError>";
}

TEST(Columns, VisibilityRoundTripIsExact) {
    const auto dir = scratch_dir("roundtrip");
    const auto& f = test::fiber();
    io::write_visibility(dir / "v.dat", f.v, {{"scenario", "unit"}});
    const auto back = io::read_visibility(dir / "v.dat", f.grids.delay);
    EXPECT_EQ(back.zero_filled, 0u);
    EXPECT_EQ(back.trace.values(), f.v.values());
    io::write_phase_constant(dir / "b.dat", f.beta);
    EXPECT_EQ(io::read_phase_constant(dir / "b.dat", f.grids.frequency).values(), f.beta.values());
    io::write_spectrum(dir / "s.dat", f.spectrum);
    EXPECT_LT(test::max_abs_diff(io::read_spectrum(dir / "s.dat", f.grids.frequency).intensity(),
                                 f.spectrum.intensity()),
              1e-12 * f.spectrum.peak());
}

TEST(Columns, HeaderAndComments) {
    std::istringstream in("# quantity: visibility\n# free text here\n\n1 2\n3 4\n");
    const auto f = io::parse_columns(in, "mem", 2);
    EXPECT_EQ(f.header.at("quantity"), "visibility");
    ASSERT_EQ(f.comments.size(), 1u);
    EXPECT_EQ(f.rows(), 2u);
    EXPECT_EQ(f.columns[1][1], 4.0);
}

TEST(Columns, CorruptLineIsReported) {
    std::istringstream bad("# x\n1 2\n3 4\n5 abc\n");
    try {
        io::parse_columns(bad, "trace.dat", 2);
        FAIL() << "no error";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("trace.dat:4:"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
    }
    std::istringstream ragged("1 2\n3\n");
    EXPECT_THROW(io::parse_columns(ragged, "r", 0), InputError);
    std::istringstream nan("1 nan\n");
    EXPECT_THROW(io::parse_columns(nan, "n", 2), InputError);
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(io::parse_columns(empty, "e", 2), InputError);
    EXPECT_THROW(io::read_columns("/nonexistent/trace.dat"), InputError);
}

TEST(Traces, NegativeVisibilityRejected) {
    const auto dir = scratch_dir("negative");
    write_text(dir / "v.dat", "0 1\n1 -0.5\n2 1\n3 1\n");
    EXPECT_THROW(io::read_visibility(dir / "v.dat", DelayGrid(1.0, 8)), InputError);
}

TEST(Traces, OffGridVisibilityIsResampled) {
    const auto dir = scratch_dir("offgrid");
    std::ostringstream text;
    for (int k = -40; k <= 40; ++k) text << k * 0.25 << ' ' << std::exp(-0.02 * k * k * 0.0625) << '\n';
    write_text(dir / "v.dat", text.str());
    const DelayGrid target(1.0, 32);
    const auto r = io::read_visibility(dir / "v.dat", target);
    EXPECT_EQ(r.zero_filled, 11u);
    EXPECT_NEAR(r.trace[16], 1.0, 1e-12);
}

TEST(Traces, SpectrumUnitsConvert) {
    const auto& f = test::fiber();
    const auto dir = scratch_dir("units");
    const double w0 = units::angular_from_wavelength(1533.0);
    const double s = units::sigma_from_fwhm(angular_fwhm(1533.0, 1.0));
    std::ostringstream thz, nm;
    thz << "# x_unit: thz\n";
    nm << "# x_unit: nm\n";
    for (int k = -4000; k <= 4000; ++k) {
        const double w = w0 + k * 0.002;
        const double i_w = std::exp(-0.5 * (w - w0) * (w - w0) / (s * s));
        thz << io::format_double(units::thz_from_angular(w)) << ' ' << io::format_double(i_w) << '\n';
    }
    for (int k = 4000; k >= -4000; --k) {
        const double lambda = 1533.0 + k * 0.002;
        const double w = units::angular_from_wavelength(lambda);
        const double i_w = std::exp(-0.5 * (w - w0) * (w - w0) / (s * s));
        // Per-nm density: I_lambda = I_omega |d omega / d lambda|.
        const double i_l = i_w * units::two_pi * units::speed_of_light / (lambda * lambda);
        nm << io::format_double(lambda) << ' ' << io::format_double(i_l) << '\n';
    }
    write_text(dir / "thz.dat", thz.str());
    write_text(dir / "nm.dat", nm.str());
    const auto a = io::read_spectrum(dir / "thz.dat", f.grids.frequency);
    const auto b = io::read_spectrum(dir / "nm.dat", f.grids.frequency);
    EXPECT_LT(test::max_abs_diff(a.intensity(), f.spectrum.intensity()), 1e-6 * f.spectrum.peak());
    EXPECT_LT(test::max_abs_diff(b.intensity(), f.spectrum.intensity()), 1e-6 * f.spectrum.peak());
    write_text(dir / "bad.dat", "# x_unit: furlong\n1 1\n2 1\n3 1\n4 1\n");
    EXPECT_THROW(io::read_spectrum(dir / "bad.dat", f.grids.frequency), InputError);
}

TEST(Traces, PhaseConstantMustCoverGrid) {
    const auto dir = scratch_dir("cover");
    write_text(dir / "b.dat", "1200 0\n1201 0\n1202 0\n1203 0\n");
    EXPECT_THROW(io::read_phase_constant(dir / "b.dat", FrequencyGrid(1201.5, 0.5, 16)), InputError);
}

TEST(KeyValue, ParsingAndErrors) {
    std::istringstream in("a = 1 # note\n# comment\nb = x y\nlist = 1, 2 3\n");
    auto kv = io::KeyValueFile::parse(in, "cfg");
    EXPECT_EQ(kv.number("a").value(), 1.0);
    EXPECT_EQ(kv.text("b").value(), "x y");
    EXPECT_EQ(kv.numbers("list").value(), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(field_of([&] { kv.number("b"); }), "b");
    EXPECT_EQ(field_of([&] { kv.integer("b"); }), "b");
    EXPECT_EQ(field_of([&] { kv.required_text("missing"); }), "missing");
    kv.set("extra", "1");
    EXPECT_EQ(field_of([&] { kv.reject_unused(); }), "extra");
    std::istringstream dup("a = 1\na = 2\n");
    EXPECT_EQ(field_of([&] { io::KeyValueFile::parse(dup, "d"); }), "a");
    std::istringstream noeq("just words\n");
    EXPECT_THROW(io::KeyValueFile::parse(noeq, "n"), InputError);
}

TEST(Scenario, DefaultsAndPaths) {
    const auto dir = scratch_dir("scenario");
    write_text(dir / "s.cfg", "medium.beta2 = 3\n");
    const auto c = app::load_scenario(dir / "s.cfg");
    EXPECT_EQ(c.name, "s");
    EXPECT_EQ(c.output_dir, dir / "out" / "s");
    EXPECT_EQ(c.grid.n_points, 1024u);
    EXPECT_EQ(c.medium.taylor, (std::vector<double>{0, 0, 3, 0}));
    EXPECT_EQ(c.retrieval.algorithm, Algorithm::gs);
    EXPECT_FALSE(c.sweep.has_value());
    const auto o = app::load_scenario(dir / "s.cfg", {{"retrieval.algorithm", "composite"}, {"output.dir", "/tmp/x"}});
    EXPECT_EQ(o.retrieval.algorithm, Algorithm::composite);
    EXPECT_EQ(o.output_dir, fs::path("/tmp/x"));
}

TEST(Scenario, ErrorsNameTheField) {
    const auto dir = scratch_dir("scenario_errors");
    auto check = [&](const std::string& text, const std::string& field) {
        write_text(dir / "e.cfg", text);
        EXPECT_EQ(field_of([&] { app::load_scenario(dir / "e.cfg"); }), field) << text;
    };
    check("medium.beta9 = 1\n", "medium.beta9");
    check("grid.n_points = 1023\n", "grid.n_points");
    check("grid.freq_spacing_thz = abc\n", "grid.freq_spacing_thz");
    check("source.kind = laser\n", "source.kind");
    check("source.kind = file\nsource.file = missing.dat\n", "source.file");
    check("medium.kind = file\n", "medium.file");
    check("medium.kind = cosine\nmedium.period = 2\n", "medium.amplitude");
    check("retrieval.max_iterations = 0\n", "retrieval.max_iterations");
    check("retrieval.algorithm = newton\n", "retrieval.algorithm");
    check("retrieval.initial_guess = taylor_seed\n", "retrieval.taylor_seed");
    check("statistics = laser\n", "statistics");
    check("sweep.idler_offsets_thz =\n", "sweep.idler_offsets_thz");
    check("sweep.jobs = 2\n", "sweep.idler_offsets_thz");
    check("sweep.idler_offsets_thz = 0 0.01\nsweep.slice_max_iterations = 5\n", "sweep.slice_max_iterations");
    EXPECT_THROW(app::load_scenario(dir / "absent.cfg"), InputError);
}

TEST(Scenario, CheckedInScenariosLoad) {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(HOMPR_SCENARIO_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        const auto c = app::load_scenario(entry.path());
        const auto g = c.grids();
        EXPECT_NO_THROW(c.spectrum(g.frequency)) << entry.path();
        EXPECT_NO_THROW(c.phase_constant(g.frequency)) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 6);
}

} // namespace
} // namespace hompr
