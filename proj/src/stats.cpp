#include "memrig/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "memrig/error.hpp"

namespace memrig::stats {

namespace {

void require_finite(const std::vector<double>& samples) {
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw ParameterError("samples must be finite");
        }
    }
}

double median_of(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return quantile_sorted(samples, 0.5);
}

// Fixed-precision number formatting keeps the SVG byte-stable.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % 10];
}

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 60.0;

// Log10 axis over the magnitudes, padded to whole decades.
struct LogAxis {
    double lo = 0.0;
    double hi = 1.0;

    static LogAxis fit(const std::vector<double>& values) {
        double min_pos = 0.0;
        double max_pos = 0.0;
        for (double v : values) {
            const double m = std::abs(v);
            if (m > 0.0) {
                min_pos = min_pos == 0.0 ? m : std::min(min_pos, m);
                max_pos = std::max(max_pos, m);
            }
        }
        if (max_pos == 0.0) {
            return {-12.0, -11.0};
        }
        LogAxis a{std::floor(std::log10(min_pos)), std::ceil(std::log10(max_pos))};
        if (a.hi <= a.lo) {
            a.hi = a.lo + 1.0;
        }
        return a;
    }

    double clamp_log(double v) const {
        const double m = std::abs(v);
        return m > 0.0 ? std::clamp(std::log10(m), lo, hi) : lo;
    }

    double frac(double v) const { return (clamp_log(v) - lo) / (hi - lo); }
};

void open_svg(std::ostringstream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth)
        << "\" height=\"" << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"white\"/>\n";
}

void frame(std::ostringstream& out) {
    out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
        << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
}

} // namespace

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
    if (samples.empty()) {
        throw ParameterError("empirical_cdf needs at least one sample");
    }
    require_finite(samples);
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    std::vector<CdfPoint> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) {
            continue;
        }
        out.push_back({samples[i], static_cast<double>(i + 1) / n});
    }
    out.back().p = 1.0;
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        throw ParameterError("quantile of an empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw ParameterError("quantile level outside [0, 1]");
    }
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> samples) {
    if (samples.size() < 2) {
        throw ParameterError("box_stats needs at least two samples");
    }
    require_finite(samples);
    std::sort(samples.begin(), samples.end());
    BoxStats b;
    b.n = samples.size();
    b.w2_5 = quantile_sorted(samples, 0.025);
    b.q25 = quantile_sorted(samples, 0.25);
    b.median = quantile_sorted(samples, 0.5);
    b.q75 = quantile_sorted(samples, 0.75);
    b.w97_5 = quantile_sorted(samples, 0.975);
    b.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(b.n);
    // A constant sample must report that constant for the mean as well.
    b.mean = std::clamp(b.mean, samples.front(), samples.back());
    return b;
}

double window_margin(const std::vector<double>& lrs, const std::vector<double>& hrs,
                     double v_read) {
    if (lrs.empty() || hrs.empty()) {
        throw ParameterError("window_margin needs samples for both states");
    }
    if (v_read == 0.0) {
        throw ParameterError("window_margin needs a nonzero read voltage");
    }
    require_finite(lrs);
    require_finite(hrs);
    const double i_hrs = median_of(hrs);
    if (i_hrs == 0.0) {
        return kInfiniteMargin;
    }
    const double r_off = v_read / i_hrs;
    const double r_on = v_read / median_of(lrs);
    return r_off / r_on;
}

std::string render_cdf_svg(const std::vector<CdfSeries>& series) {
    if (series.empty()) {
        throw ParameterError("nothing to plot");
    }
    std::vector<double> all;
    for (const auto& s : series) {
        if (s.points.empty()) {
            throw ParameterError("empty CDF series '" + s.label + "'");
        }
        for (const auto& p : s.points) {
            all.push_back(p.value);
        }
    }
    const LogAxis axis = LogAxis::fit(all);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto x_of = [&](double v) { return kLeft + axis.frac(v) * pw; };
    auto y_of = [&](double p) { return kTop + (1.0 - p) * ph; };

    std::ostringstream out;
    open_svg(out);
    frame(out);
    for (double d = axis.lo; d <= axis.hi + 1e-9; d += 1.0) {
        const double x = kLeft + (d - axis.lo) / (axis.hi - axis.lo) * pw;
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 20)
            << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double p = k / 4.0;
        out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y_of(p) + 4)
            << "\" text-anchor=\"end\">" << num(p) << "</text>\n";
    }
    out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
        << "\" text-anchor=\"middle\">|I| (A)</text>\n"
        << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" transform=\"rotate(-90 20 "
        << num(kTop + ph / 2) << ")\" text-anchor=\"middle\">CDF</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        out << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" points=\"";
        double prev = 0.0;
        for (const auto& p : s.points) {
            out << num(x_of(p.value)) << ',' << num(y_of(prev)) << ' ' << num(x_of(p.value))
                << ',' << num(y_of(p.p)) << ' ';
            prev = p.p;
        }
        out << "\"/>\n";
        const double ly = kTop + 14.0 * static_cast<double>(i) + 10.0;
        out << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
            << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color(i)
            << "\"/>\n"
            << "<text x=\"" << num(kWidth - kRight + 35) << "\" y=\"" << num(ly + 4) << "\">"
            << escape(s.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_boxplot_svg(const std::vector<BoxGroup>& groups) {
    if (groups.empty()) {
        throw ParameterError("nothing to plot");
    }
    std::vector<double> all;
    std::vector<std::string> series_names;
    for (const auto& g : groups) {
        all.insert(all.end(), {g.box.w2_5, g.box.w97_5, g.box.mean});
        if (std::find(series_names.begin(), series_names.end(), g.series) ==
            series_names.end()) {
            series_names.push_back(g.series);
        }
    }
    const LogAxis axis = LogAxis::fit(all);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const double slot = pw / static_cast<double>(groups.size());
    auto x_of = [&](std::size_t i) { return kLeft + (static_cast<double>(i) + 0.5) * slot; };
    auto y_of = [&](double v) { return kTop + (1.0 - axis.frac(v)) * ph; };

    std::ostringstream out;
    open_svg(out);
    frame(out);
    for (double d = axis.lo; d <= axis.hi + 1e-9; d += 1.0) {
        const double y = kTop + (1.0 - (d - axis.lo) / (axis.hi - axis.lo)) * ph;
        out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
    }
    out << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" transform=\"rotate(-90 20 "
        << num(kTop + ph / 2) << ")\" text-anchor=\"middle\">|I| (A)</text>\n";

    const double half = std::min(slot * 0.3, 12.0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& b = groups[i].box;
        const auto s = static_cast<std::size_t>(
            std::find(series_names.begin(), series_names.end(), groups[i].series) -
            series_names.begin());
        const double x = x_of(i);
        const double y_q25 = y_of(b.q25);
        const double y_q75 = y_of(b.q75);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y_of(b.w2_5)) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(y_of(b.w97_5)) << "\" stroke=\"" << color(s) << "\"/>\n"
            << "<rect class=\"box\" x=\"" << num(x - half) << "\" y=\"" << num(std::min(y_q25, y_q75))
            << "\" width=\"" << num(2 * half) << "\" height=\"" << num(std::abs(y_q25 - y_q75))
            << "\" fill=\"white\" stroke=\"" << color(s) << "\"/>\n"
            << "<line x1=\"" << num(x - half) << "\" y1=\"" << num(y_of(b.median)) << "\" x2=\""
            << num(x + half) << "\" y2=\"" << num(y_of(b.median)) << "\" stroke=\"" << color(s)
            << "\" stroke-width=\"3\"/>\n"
            << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 16)
            << "\" text-anchor=\"middle\" font-size=\"9\">" << escape(groups[i].label)
            << "</text>\n";
    }
    for (std::size_t s = 0; s < series_names.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\"" << color(s)
            << "\" stroke-dasharray=\"4,3\" points=\"";
        for (std::size_t i = 0; i < groups.size(); ++i) {
            if (groups[i].series == series_names[s]) {
                out << num(x_of(i)) << ',' << num(y_of(groups[i].box.mean)) << ' ';
            }
        }
        out << "\"/>\n";
        const double ly = kTop + 14.0 * static_cast<double>(s) + 10.0;
        out << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
            << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color(s)
            << "\"/>\n"
            << "<text x=\"" << num(kWidth - kRight + 35) << "\" y=\"" << num(ly + 4) << "\">"
            << escape(series_names[s]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace memrig::stats
