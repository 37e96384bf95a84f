#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srsmile/calibration.hpp"
#include "srsmile/drift.hpp"
#include "srsmile/implied.hpp"
#include "srsmile/io.hpp"
#include "srsmile/mc.hpp"
#include "srsmile/pricing.hpp"
#include "srsmile/validation.hpp"

namespace {

using namespace srsmile;

constexpr int kExitOk = 0;
constexpr int kExitValidationFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

struct RunConfig {
    std::string model_dir;
    std::string quotes_path;
    std::string instruments_path;
    std::string out_dir = ".";
    long paths = 1'000'000;
    std::uint64_t seed = 42;
    int steps_per_year = 365;
    double tol = 0.0;  // 0 = library default
    bool compare_libor = false;
    bool quick = false;
    bool with_mc = false;
};

QuadratureSpec make_spec(const RunConfig& cfg) {
    QuadratureSpec spec;
    if (cfg.tol > 0.0) spec.target_rel_tol = cfg.tol;
    return spec;
}

// FNV-1a digest of a file's bytes, for the manifest.
std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = command;
    j["settings"] = {{"paths", cfg.paths},
                     {"seed", cfg.seed},
                     {"steps_per_year", cfg.steps_per_year},
                     {"tol", cfg.tol},
                     {"compare_libor", cfg.compare_libor},
                     {"quick", cfg.quick},
                     {"mc", cfg.with_mc}};
    nlohmann::json inputs = nlohmann::json::object();
    if (!cfg.model_dir.empty()) {
        for (const char* f : {"discount.csv", "sigma.csv", "alpha.csv", "gamma.csv", "y_star.csv"}) {
            const std::string p = cfg.model_dir + "/" + f;
            inputs[p] = file_digest(p);
        }
    }
    if (!cfg.quotes_path.empty()) inputs[cfg.quotes_path] = file_digest(cfg.quotes_path);
    if (!cfg.instruments_path.empty())
        inputs[cfg.instruments_path] = file_digest(cfg.instruments_path);
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    std::ofstream out(cfg.out_dir + "/manifest.json");
    out << j.dump(2) << "\n";
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/" + name);
    if (!out) throw std::runtime_error("cannot open output file " + cfg.out_dir + "/" + name);
    return out;
}

double instrument_horizon(const std::vector<InstrumentSpec>& insts) {
    double h = 0.0;
    for (const auto& i : insts) h = std::max(h, i.times.back());
    return h;
}

int cmd_price(const RunConfig& cfg) {
    ModelParams m = load_model_dir(cfg.model_dir);
    const auto insts = read_instruments_csv(cfg.instruments_path);
    const QuadratureSpec spec = make_spec(cfg);

    auto out = open_out(cfg, "prices.csv");
    out << "instrument_id,pv,order0,order1,effective_variance,implied_hw_vol";
    if (cfg.with_mc) out << ",mc_pv,mc_se,within_3se";
    out << "\n";

    if (!insts.empty()) {
        install_drift(m, instrument_horizon(insts) + 0.25, spec);
        for (const auto& inst : insts) {
            PriceResult pr;
            switch (inst.kind) {
                case InstrumentSpec::Kind::RfrCaplet: pr = price_rfr_caplet(m, inst, spec); break;
                case InstrumentSpec::Kind::LiborCaplet:
                    pr = price_libor_caplet(m, inst, spec);
                    break;
                case InstrumentSpec::Kind::PayerSwaption: pr = price_swaption(m, inst, spec); break;
            }
            const EffectiveVariance ev = effective_variance(m, inst, spec);
            const double iv = implied_hw_vol(m, inst, pr.pv, spec);
            char line[256];
            std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g,%.17g", inst.id.c_str(),
                          pr.pv, pr.order0, pr.order1, ev.total(), iv);
            out << line;
            if (cfg.with_mc) {
                McConfig mc{cfg.quick ? cfg.paths / 10 : cfg.paths, cfg.steps_per_year, cfg.seed};
                const McEstimate e = mc_price(m, inst, mc, spec);
                std::snprintf(line, sizeof line, ",%.17g,%.17g,%d", e.pv, e.se,
                              std::abs(e.pv - pr.pv) <= 3.0 * e.se ? 1 : 0);
                out << line;
            }
            out << "\n";
        }
    }
    write_manifest(cfg, "price", {"prices.csv"});
    return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg) {
    const DiscountCurve discount = read_discount_csv(cfg.model_dir + "/discount.csv");
    const PiecewiseCurve alpha = read_curve_csv(cfg.model_dir + "/alpha.csv");
    const QuoteSurface surface = read_quotes_csv(cfg.quotes_path, cfg.compare_libor);
    const QuadratureSpec spec = make_spec(cfg);

    const CalibrationReport rep = calibrate(surface, discount, alpha, spec);
    std::filesystem::create_directories(cfg.out_dir);
    write_curve_csv(cfg.out_dir + "/sigma.csv", rep.sigma);
    write_curve_csv(cfg.out_dir + "/gamma.csv", rep.gamma);
    write_curve_csv(cfg.out_dir + "/y_star.csv", rep.y_star);
    write_curve_csv(cfg.out_dir + "/alpha.csv", alpha);
    write_discount_csv(cfg.out_dir + "/discount.csv", discount);

    auto out = open_out(cfg, "residuals.csv");
    out << "maturity,tenor,strike,market_vol,fitted_vol,residual\n";
    for (std::size_t i = 0; i < surface.quotes.size(); ++i) {
        const Quote& q = surface.quotes[i];
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", q.maturity,
                      q.tenor, q.strike, q.implied_vol, q.implied_vol + rep.residuals[i],
                      rep.residuals[i]);
        out << line;
    }
    write_manifest(cfg, "calibrate",
                   {"sigma.csv", "gamma.csv", "y_star.csv", "alpha.csv", "discount.csv",
                    "residuals.csv"});
    if (!rep.converged) {
        std::fprintf(stderr, "calibration did not converge\n");
        return kExitNumericalError;
    }
    return kExitOk;
}

int cmd_surface(const RunConfig& cfg) {
    ModelParams m = load_model_dir(cfg.model_dir);
    const QuadratureSpec spec = make_spec(cfg);

    std::vector<double> maturities, strikes;
    double tenor = 0.5;
    if (!cfg.quotes_path.empty()) {
        const QuoteSurface s = read_quotes_csv(cfg.quotes_path);
        for (const Quote& q : s.quotes) {
            maturities.push_back(q.maturity);
            strikes.push_back(q.strike);
            tenor = q.tenor;
        }
        auto uniq = [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        uniq(maturities);
        uniq(strikes);
    } else {
        maturities = {1.0, 2.0, 3.0, 5.0};
        strikes = {0.01, 0.015, 0.02, 0.025, 0.03};
    }

    auto out = open_out(cfg, "surface.csv");
    out << "maturity,strike,implied_vol,effective_variance,eps_diagnostic";
    if (cfg.compare_libor) out << ",libor_implied_vol";
    out << "\n";
    for (double T2 : maturities) {
        for (double K : strikes) {
            const auto inst = InstrumentSpec::rfr_caplet(T2 - tenor, T2, K, tenor);
            const EffectiveVariance ev = effective_variance_rfr(m, inst, spec);
            const double iv = surface_implied_vol(m, inst, spec);
            char line[256];
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g", T2, K, iv,
                          ev.total(), ev.eps_diagnostic);
            out << line;
            if (cfg.compare_libor) {
                const auto li = InstrumentSpec::libor_caplet(T2 - tenor, T2, K, tenor);
                std::snprintf(line, sizeof line, ",%.17g", surface_implied_vol(m, li, spec));
                out << line;
            }
            out << "\n";
        }
    }
    write_manifest(cfg, "surface", {"surface.csv"});
    return kExitOk;
}

int cmd_forwards(const RunConfig& cfg) {
    ModelParams m = load_model_dir(cfg.model_dir);
    const QuadratureSpec spec = make_spec(cfg);
    const double t = 1.0, T = 2.0;
    install_drift(m, T + 0.25, spec);
    ModelParams hw(m.sigma(), m.alpha(), PiecewiseCurve::constant(1e-8),
                   PiecewiseCurve::constant(0.0), m.discount());
    install_drift(hw, T + 0.25, spec);

    auto out = open_out(cfg, "forwards.csv");
    out << "t,y,forward_rate,hw_forward_rate\n";
    for (int i = -40; i <= 40; ++i) {
        const double y = 0.001 * i;
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", t, y,
                      forward_rate(m, y, t, T, spec), forward_rate(hw, y, t, T, spec));
        out << line;
    }
    write_manifest(cfg, "forwards", {"forwards.csv"});
    return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
    if (!cfg.model_dir.empty()) (void)load_model_dir(cfg.model_dir);  // input check only
    ValidationConfig vc;
    vc.quick = cfg.quick;
    vc.seed = cfg.seed;
    vc.steps_per_year = cfg.steps_per_year;
    const auto results = run_validation(vc);

    nlohmann::json report = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("criterion %d [%s] %-40s %7.2fs  %s\n", r.index, r.pass ? "PASS" : "FAIL",
                    r.name.c_str(), r.seconds, r.details.c_str());
        report.push_back({{"index", r.index},
                          {"name", r.name},
                          {"pass", r.pass},
                          {"seconds", r.seconds},
                          {"details", r.details}});
        all_pass = all_pass && r.pass;
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/validation.json");
    out << report.dump(2) << "\n";
    write_manifest(cfg, "validate", {"validation.json"});
    return all_pass ? kExitOk : kExitValidationFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic short-rate smile pricing toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--model", cfg.model_dir, "model directory (curve CSVs)");
    app.add_option("--quotes", cfg.quotes_path, "caplet quote CSV");
    app.add_option("--instruments", cfg.instruments_path, "instrument CSV");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--paths", cfg.paths, "Monte Carlo paths");
    app.add_option("--seed", cfg.seed, "Monte Carlo seed");
    app.add_option("--steps-per-year", cfg.steps_per_year, "Monte Carlo time steps per year");
    app.add_option("--tol", cfg.tol, "quadrature relative tolerance override");
    app.add_flag("--compare-libor", cfg.compare_libor, "add term-rate comparison column");
    app.add_flag("--quick", cfg.quick, "reduced Monte Carlo path counts");
    app.add_flag("--mc", cfg.with_mc, "add Monte Carlo check columns to price output");

    auto* price = app.add_subcommand("price", "price instruments from a model directory");
    price->callback([] {});
    auto* calibrate_cmd = app.add_subcommand("calibrate", "fit smile parameters to quotes");
    auto* surface = app.add_subcommand("surface", "implied-volatility surface grid");
    auto* forwards = app.add_subcommand("forwards", "forward-rate curve vs factor level");
    auto* validate = app.add_subcommand("validate", "run the acceptance suite");
    // let options written after the subcommand name match the global set
    for (auto* sub : {price, calibrate_cmd, surface, forwards, validate}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) {
            if (cfg.model_dir.empty() || cfg.instruments_path.empty())
                throw ParseError("<args>", 0, "price requires --model and --instruments");
            return cmd_price(cfg);
        }
        if (calibrate_cmd->parsed()) {
            if (cfg.model_dir.empty() || cfg.quotes_path.empty())
                throw ParseError("<args>", 0, "calibrate requires --model and --quotes");
            return cmd_calibrate(cfg);
        }
        if (surface->parsed()) {
            if (cfg.model_dir.empty())
                throw ParseError("<args>", 0, "surface requires --model");
            return cmd_surface(cfg);
        }
        if (forwards->parsed()) {
            if (cfg.model_dir.empty())
                throw ParseError("<args>", 0, "forwards requires --model");
            return cmd_forwards(cfg);
        }
        if (validate->parsed()) return cmd_validate(cfg);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumericalError;
    }
    return kExitOk;
}
