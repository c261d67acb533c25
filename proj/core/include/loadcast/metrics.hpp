#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace loadcast::metrics {

/// Coefficient of determination: 1 - sum((y - yhat)^2) / sum((y - mean(y))^2).
/// Requires n >= 2 and a non-constant y.
double r_squared(const std::vector<double>& y, const std::vector<double>& yhat);

/// Mean absolute percentage error as a fraction: (1/n) * sum(|y - yhat| / |y|).
/// Stored as a fraction internally; multiply by 100 only when reporting.
double mape_fraction(const std::vector<double>& y, const std::vector<double>& yhat);

/// mape_fraction scaled to percent.
double mape_percent(const std::vector<double>& y, const std::vector<double>& yhat);

/// Mean absolute error: (1/n) * sum(|y - yhat|).
double mae(const std::vector<double>& y, const std::vector<double>& yhat);

/// The three evaluation metrics over one prediction set, computed on
/// denormalized values.
struct EvalReport {
    double r2 = 0.0;
    double mape_percent = 0.0;
    double mae = 0.0;
    std::size_t n = 0;
    std::vector<double> residuals;  // y - yhat, kept for optional export
};

EvalReport evaluate(const std::vector<double>& y, const std::vector<double>& yhat);

/// JSON object with exactly the keys r2, mape_percent, mae, n.
std::string to_json(const EvalReport& report);

/// CSV header + one row in column order r2, mape_percent, mae.
std::string to_csv(const EvalReport& report);

}  // namespace loadcast::metrics
