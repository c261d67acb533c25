#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "loadcast/error.hpp"
#include "loadcast/metrics.hpp"

namespace loadcast::metrics {

namespace {

void require_same_length(const std::vector<double>& y, const std::vector<double>& yhat,
                         const char* metric) {
    if (y.size() != yhat.size()) {
        throw errors::shape(std::string(metric) + " input lengths differ: " +
                            std::to_string(y.size()) + " vs " + std::to_string(yhat.size()));
    }
    if (y.empty()) throw errors::domain(std::string(metric) + " needs at least one point");
}

}  // namespace

double r_squared(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_length(y, yhat, "r_squared");
    if (y.size() < 2) throw errors::domain("r_squared needs at least two points");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) throw errors::domain("r_squared is undefined for a constant target");
    return 1.0 - ss_res / ss_tot;
}

double mape_fraction(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_length(y, yhat, "mape");
    std::string zero_indices;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) zero_indices += (zero_indices.empty() ? "" : ", ") + std::to_string(i);
    }
    if (!zero_indices.empty()) {
        throw errors::domain("mape is undefined for zero targets at indices " + zero_indices);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
    return sum / static_cast<double>(y.size());
}

double mape_percent(const std::vector<double>& y, const std::vector<double>& yhat) {
    return mape_fraction(y, yhat) * 100.0;
}

double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
    require_same_length(y, yhat, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]);
    return sum / static_cast<double>(y.size());
}

EvalReport evaluate(const std::vector<double>& y, const std::vector<double>& yhat) {
    EvalReport report;
    report.r2 = r_squared(y, yhat);
    report.mape_percent = mape_percent(y, yhat);
    report.mae = mae(y, yhat);
    report.n = y.size();
    report.residuals.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) report.residuals[i] = y[i] - yhat[i];
    return report;
}

std::string to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["r2"] = report.r2;
    j["mape_percent"] = report.mape_percent;
    j["mae"] = report.mae;
    j["n"] = report.n;
    return j.dump(2) + "\n";
}

std::string to_csv(const EvalReport& report) {
    char row[128];
    std::snprintf(row, sizeof(row), "%.12g,%.12g,%.12g\n", report.r2, report.mape_percent,
                  report.mae);
    return std::string("r2,mape_percent,mae\n") + row;
}

}  // namespace loadcast::metrics
