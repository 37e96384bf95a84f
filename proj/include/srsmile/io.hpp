#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "srsmile/calibration.hpp"
#include "srsmile/pricing.hpp"
#include "srsmile/termstructure.hpp"

namespace srsmile {

// Malformed input file; message carries "path:line: reason".
struct ParseError : std::runtime_error {
    ParseError(const std::string& path, int line, const std::string& reason)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + reason),
          path(path),
          line(line) {}
    std::string path;
    int line;
};

// Parameter curve CSV, header `time,value`; breakpoint times ascending from 0.
PiecewiseCurve read_curve_csv(const std::string& path);
void write_curve_csv(const std::string& path, const PiecewiseCurve& curve);

// Discount pillar CSV, header `time,discount`.
DiscountCurve read_discount_csv(const std::string& path);
void write_discount_csv(const std::string& path, const DiscountCurve& curve);

// Model directory: discount.csv, sigma.csv, alpha.csv, gamma.csv, y_star.csv.
ModelParams load_model_dir(const std::string& dir);
void save_model_dir(const std::string& dir, const ModelParams& m);

// Caplet quote CSV, header `maturity,tenor,strike,implied_vol`.
QuoteSurface read_quotes_csv(const std::string& path, bool libor = false);
void write_quotes_csv(const std::string& path, const QuoteSurface& surface);

// Instrument CSV, header `id,kind,times...,strike,accruals...` with a flat
// variable-width column layout:
//   caplets  : id,kind,T1,T2,strike,accrual               (6 columns)
//   swaption : id,kind,T0..Tn,strike,accrual_1..accrual_n (2n + 4 columns)
// kind is one of rfr_caplet | libor_caplet | payer_swaption.
std::vector<InstrumentSpec> read_instruments_csv(const std::string& path);

}  // namespace srsmile
