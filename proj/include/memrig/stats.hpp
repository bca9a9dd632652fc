#pragma once

#include <limits>
#include <string>
#include <vector>

namespace memrig::stats {

struct CdfPoint {
    double value = 0.0;
    double p = 0.0;

    bool operator==(const CdfPoint&) const = default;
};

/// Step CDF with p = rank / n; ties keep only their highest rank.
/// Throws ParameterError on empty or non-finite input.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

/// Linear interpolation between closest order statistics (type 7).
/// `sorted` must be ascending and non-empty; q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

struct BoxStats {
    double w2_5 = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double w97_5 = 0.0;
    double mean = 0.0;
    std::size_t n = 0;
};

/// Throws ParameterError for fewer than two samples.
BoxStats box_stats(std::vector<double> samples);

inline constexpr double kInfiniteMargin = std::numeric_limits<double>::infinity();

/// R_OFF / R_ON from median currents at a common read voltage:
/// median(lrs) / median(hrs). kInfiniteMargin when the HRS median is zero.
double window_margin(const std::vector<double>& lrs, const std::vector<double>& hrs,
                     double v_read);

struct CdfSeries {
    std::string label;
    std::vector<CdfPoint> points;
};

struct BoxGroup {
    std::string label;   // x-axis tick
    std::string series;  // means of consecutive groups in one series are joined
    BoxStats box;
};

/// Standalone SVG documents; identical input gives identical bytes.
/// Currents are drawn by magnitude on a log axis.
std::string render_cdf_svg(const std::vector<CdfSeries>& series);
std::string render_boxplot_svg(const std::vector<BoxGroup>& groups);

} // namespace memrig::stats
