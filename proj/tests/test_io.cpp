#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>

#include "srsmile/io.hpp"

using namespace srsmile;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("srsmile_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("curve csv round trip preserves breakpoints and values") {
    TempDir tmp;
    PiecewiseCurve c({0.0, 0.5, 2.25}, {0.01, 0.0123456789012345, 0.02});
    write_curve_csv(tmp.file("c.csv"), c);
    PiecewiseCurve back = read_curve_csv(tmp.file("c.csv"));
    REQUIRE(back.breakpoints() == c.breakpoints());
    REQUIRE(back.values() == c.values());
}

TEST_CASE("discount csv round trip") {
    TempDir tmp;
    DiscountCurve d({0.5, 1.0, 5.0}, {0.99, 0.9801, 0.9});
    write_discount_csv(tmp.file("d.csv"), d);
    DiscountCurve back = read_discount_csv(tmp.file("d.csv"));
    for (double t : {0.25, 0.5, 2.0, 7.0})
        CHECK(back.discount(t) == doctest::Approx(d.discount(t)).epsilon(1e-15));
}

TEST_CASE("model directory round trip") {
    TempDir tmp;
    ModelParams m(PiecewiseCurve({0.0, 1.0}, {0.01, 0.012}), PiecewiseCurve::constant(0.15),
                  PiecewiseCurve({0.0, 2.0}, {50.0, 40.0}), PiecewiseCurve::constant(0.004),
                  DiscountCurve({1.0, 5.0}, {0.98, 0.9}));
    save_model_dir(tmp.path.string(), m);
    ModelParams back = load_model_dir(tmp.path.string());
    CHECK(back.sigma().values() == m.sigma().values());
    CHECK(back.gamma().breakpoints() == m.gamma().breakpoints());
    CHECK(back.discount().discount(3.0) ==
          doctest::Approx(m.discount().discount(3.0)).epsilon(1e-15));
}

TEST_CASE("quotes csv round trip") {
    TempDir tmp;
    QuoteSurface s;
    s.quotes.push_back({1.5, 0.5, 0.02, 0.0123});
    s.quotes.push_back({3.0, 0.5, 0.01, 0.0145});
    write_quotes_csv(tmp.file("q.csv"), s);
    QuoteSurface back = read_quotes_csv(tmp.file("q.csv"));
    REQUIRE(back.quotes.size() == 2);
    CHECK(back.quotes[1].implied_vol == 0.0145);
}

TEST_CASE("instrument csv parses caplets and swaptions") {
    TempDir tmp;
    write_file(tmp.file("i.csv"),
               "id,kind,times...,strike,accruals...\n"
               "# a comment line\n"
               "c1,rfr_caplet,1.0,1.5,0.02,0.5\n"
               "l1,libor_caplet,1.0,1.5,0.02,0.5\n"
               "\n"
               "s1,payer_swaption,1.0,1.5,2.0,0.02,0.5,0.5\n");
    const auto insts = read_instruments_csv(tmp.file("i.csv"));
    REQUIRE(insts.size() == 3);
    CHECK(insts[0].kind == InstrumentSpec::Kind::RfrCaplet);
    CHECK(insts[2].kind == InstrumentSpec::Kind::PayerSwaption);
    CHECK(insts[2].times.size() == 3);
    CHECK(insts[2].accruals.size() == 2);
    CHECK(insts[1].id == "l1");
}

TEST_CASE("parse errors carry the offending line number") {
    TempDir tmp;
    write_file(tmp.file("bad.csv"),
               "id,kind,times...,strike,accruals...\n"
               "c1,rfr_caplet,1.0,1.5,0.02,0.5\n"
               "c2,rfr_caplet,oops,1.5,0.02,0.5\n");
    try {
        read_instruments_csv(tmp.file("bad.csv"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
}

TEST_CASE("curve csv rejects a broken header") {
    TempDir tmp;
    write_file(tmp.file("h.csv"), "when,value\n0,0.01\n");
    CHECK_THROWS_AS(read_curve_csv(tmp.file("h.csv")), ParseError);
}

TEST_CASE("missing file raises a parse error at line zero") {
    CHECK_THROWS_AS(read_curve_csv("/nonexistent/nope.csv"), ParseError);
}

TEST_CASE("unknown instrument kind is rejected") {
    TempDir tmp;
    write_file(tmp.file("k.csv"),
               "id,kind,times...,strike,accruals...\n"
               "x,forward_swap,1.0,1.5,0.02,0.5\n");
    CHECK_THROWS_AS(read_instruments_csv(tmp.file("k.csv")), ParseError);
}
