#include "srsmile/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace srsmile {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto a = f.find_first_not_of(" \t");
        if (a == std::string::npos) {
            f.clear();
            continue;
        }
        const auto b = f.find_last_not_of(" \t");
        f = f.substr(a, b - a + 1);
    }
    return out;
}

double parse_number(const std::string& path, int line, const std::string& field) {
    double v = 0.0;
    const char* b = field.data();
    const char* e = b + field.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e)
        throw ParseError(path, line, "expected a number, got '" + field + "'");
    return v;
}

struct CsvTable {
    std::vector<std::vector<std::string>> rows;  // data rows only
    std::vector<int> line_of;                    // source line per data row
};

CsvTable read_csv(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    CsvTable tab;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (!saw_header) {
            if (fields.size() < header.size())
                throw ParseError(path, lineno, "missing header columns");
            for (std::size_t i = 0; i < header.size(); ++i)
                if (fields[i] != header[i])
                    throw ParseError(path, lineno,
                                     "expected header column '" + header[i] + "', got '" +
                                         fields[i] + "'");
            saw_header = true;
            continue;
        }
        if (fields.size() == 1 && fields[0].empty()) continue;
        tab.rows.push_back(std::move(fields));
        tab.line_of.push_back(lineno);
    }
    if (!saw_header) throw ParseError(path, lineno, "empty file (no header)");
    return tab;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

PiecewiseCurve read_curve_csv(const std::string& path) {
    const CsvTable tab = read_csv(path, {"time", "value"});
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const int ln = tab.line_of[i];
        if (tab.rows[i].size() != 2) throw ParseError(path, ln, "expected 2 columns");
        ts.push_back(parse_number(path, ln, tab.rows[i][0]));
        vs.push_back(parse_number(path, ln, tab.rows[i][1]));
        if (i == 0 && ts[0] != 0.0) throw ParseError(path, ln, "first breakpoint must be 0");
        if (i > 0 && !(ts[i] > ts[i - 1]))
            throw ParseError(path, ln, "breakpoints must be strictly ascending");
    }
    if (ts.empty()) throw ParseError(path, 0, "no data rows");
    return PiecewiseCurve(std::move(ts), std::move(vs));
}

void write_curve_csv(const std::string& path, const PiecewiseCurve& curve) {
    std::ofstream out(path);
    out << "time,value\n";
    for (std::size_t i = 0; i < curve.breakpoints().size(); ++i)
        out << fmt(curve.breakpoints()[i]) << "," << fmt(curve.values()[i]) << "\n";
}

DiscountCurve read_discount_csv(const std::string& path) {
    const CsvTable tab = read_csv(path, {"time", "discount"});
    std::vector<double> ts, ds;
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const int ln = tab.line_of[i];
        if (tab.rows[i].size() != 2) throw ParseError(path, ln, "expected 2 columns");
        const double t = parse_number(path, ln, tab.rows[i][0]);
        const double d = parse_number(path, ln, tab.rows[i][1]);
        if (!(d > 0.0)) throw ParseError(path, ln, "discount factors must be > 0");
        if (!ts.empty() && !(t > ts.back()))
            throw ParseError(path, ln, "pillar times must be strictly ascending");
        if (ts.empty() && !(t > 0.0)) throw ParseError(path, ln, "pillar times must be > 0");
        ts.push_back(t);
        ds.push_back(d);
    }
    if (ts.empty()) throw ParseError(path, 0, "no data rows");
    return DiscountCurve(std::move(ts), std::move(ds));
}

void write_discount_csv(const std::string& path, const DiscountCurve& curve) {
    std::ofstream out(path);
    out << "time,discount\n";
    for (double t : curve.pillar_times()) {
        if (t == 0.0) continue;  // implicit D(0,0) = 1 pillar, rejected on read
        out << fmt(t) << "," << fmt(curve.discount(t)) << "\n";
    }
}

ModelParams load_model_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    const auto file = [&](const char* name) { return (fs::path(dir) / name).string(); };
    return ModelParams(read_curve_csv(file("sigma.csv")), read_curve_csv(file("alpha.csv")),
                       read_curve_csv(file("gamma.csv")), read_curve_csv(file("y_star.csv")),
                       read_discount_csv(file("discount.csv")));
}

void save_model_dir(const std::string& dir, const ModelParams& m) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto file = [&](const char* name) { return (fs::path(dir) / name).string(); };
    write_curve_csv(file("sigma.csv"), m.sigma());
    write_curve_csv(file("alpha.csv"), m.alpha());
    write_curve_csv(file("gamma.csv"), m.gamma());
    write_curve_csv(file("y_star.csv"), m.y_star());
    write_discount_csv(file("discount.csv"), m.discount());
}

QuoteSurface read_quotes_csv(const std::string& path, bool libor) {
    const CsvTable tab = read_csv(path, {"maturity", "tenor", "strike", "implied_vol"});
    QuoteSurface surf;
    surf.libor = libor;
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const int ln = tab.line_of[i];
        if (tab.rows[i].size() != 4) throw ParseError(path, ln, "expected 4 columns");
        Quote q;
        q.maturity = parse_number(path, ln, tab.rows[i][0]);
        q.tenor = parse_number(path, ln, tab.rows[i][1]);
        q.strike = parse_number(path, ln, tab.rows[i][2]);
        q.implied_vol = parse_number(path, ln, tab.rows[i][3]);
        if (!(q.maturity > 0.0)) throw ParseError(path, ln, "maturity must be > 0");
        if (!(q.tenor > 0.0 && q.tenor < q.maturity))
            throw ParseError(path, ln, "need 0 < tenor < maturity");
        if (!(q.implied_vol > 0.0)) throw ParseError(path, ln, "implied_vol must be > 0");
        if (!surf.quotes.empty() && q.maturity < surf.quotes.back().maturity)
            throw ParseError(path, ln, "maturities must be ascending");
        surf.quotes.push_back(q);
    }
    if (surf.quotes.empty()) throw ParseError(path, 0, "no data rows");
    return surf;
}

void write_quotes_csv(const std::string& path, const QuoteSurface& surface) {
    std::ofstream out(path);
    out << "maturity,tenor,strike,implied_vol\n";
    for (const Quote& q : surface.quotes)
        out << fmt(q.maturity) << "," << fmt(q.tenor) << "," << fmt(q.strike) << ","
            << fmt(q.implied_vol) << "\n";
}

std::vector<InstrumentSpec> read_instruments_csv(const std::string& path) {
    const CsvTable tab = read_csv(path, {"id", "kind"});
    std::vector<InstrumentSpec> out;
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const int ln = tab.line_of[i];
        const auto& f = tab.rows[i];
        if (f.size() < 6) throw ParseError(path, ln, "expected at least 6 columns");
        InstrumentSpec inst;
        inst.id = f[0];
        const std::string& kind = f[1];
        if (kind == "rfr_caplet" || kind == "libor_caplet") {
            if (f.size() != 6)
                throw ParseError(path, ln, "caplet rows need exactly 6 columns "
                                           "(id,kind,T1,T2,strike,accrual)");
            inst.kind = kind == "rfr_caplet" ? InstrumentSpec::Kind::RfrCaplet
                                             : InstrumentSpec::Kind::LiborCaplet;
            inst.times = {parse_number(path, ln, f[2]), parse_number(path, ln, f[3])};
            inst.strike = parse_number(path, ln, f[4]);
            inst.accruals = {parse_number(path, ln, f[5])};
        } else if (kind == "payer_swaption") {
            // 2 + (n+1) times + 1 strike + n accruals = 2n + 4 columns.
            if (f.size() < 8 || f.size() % 2 != 0)
                throw ParseError(path, ln, "swaption rows need 2n+4 columns "
                                           "(id,kind,T0..Tn,strike,accrual_1..accrual_n)");
            const std::size_t n = (f.size() - 4) / 2;
            inst.kind = InstrumentSpec::Kind::PayerSwaption;
            for (std::size_t j = 0; j <= n; ++j)
                inst.times.push_back(parse_number(path, ln, f[2 + j]));
            inst.strike = parse_number(path, ln, f[3 + n]);
            for (std::size_t j = 0; j < n; ++j)
                inst.accruals.push_back(parse_number(path, ln, f[4 + n + j]));
        } else {
            throw ParseError(path, ln, "unknown kind '" + kind +
                                           "' (rfr_caplet|libor_caplet|payer_swaption)");
        }
        try {
            inst.validate();
        } catch (const std::exception& e) {
            throw ParseError(path, ln, e.what());
        }
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace srsmile
