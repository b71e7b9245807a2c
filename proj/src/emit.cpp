#include "feedflow/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace feedflow {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const Scenario& sc) {
    const ProcessGraph& g = traj.graph;
    const double per_h = traj.rate_to_per_hour();
    const double per_min = 1.0 / traj.period_minutes;
    std::ostringstream out;

    out << "# feedflow-trajectory-v1 control=" << to_string(traj.control)
        << " milling=" << to_string(traj.milling) << " delta_minutes=" << fmt(traj.period_minutes)
        << " k_star=" << fmt(traj.k_star) << "\n";

    out << "period,hours,moisture,in_feed_dry_mg_h,conveyor_speed_m_min";
    for (const auto& e : g.equipment) out << ",out." << e.id;
    auto storage = g.storage_units();
    for (int su : storage)
        for (int s = 0; s < sc.levels.size(); ++s)
            out << ",sout." << g.equipment[su].id << "." << sc.levels.label(s);
    for (int su : storage)
        for (int s = 0; s < sc.levels.size(); ++s)
            out << ",inv." << g.equipment[su].id << "." << sc.levels.label(s);
    out << ",beta_plus,beta_minus\n";

    for (int t = 0; t < traj.horizon; ++t) {
        out << (t + 1) << ',' << fmt((t + 1) * traj.period_minutes / 60.0) << ','
            << sc.levels.label(traj.schedule.level_at(t));
        out << ',' << fmt(traj.in_feed[t] * per_h) << ',' << fmt(traj.conveyor_speed[t] * per_min);
        for (int e = 0; e < g.size(); ++e) out << ',' << fmt(traj.outflow[e][t] * per_h);
        for (size_t p = 0; p < storage.size(); ++p)
            for (int s = 0; s < sc.levels.size(); ++s)
                out << ',' << fmt(traj.storage_out[p][s][t] * per_h);
        for (size_t p = 0; p < storage.size(); ++p)
            for (int s = 0; s < sc.levels.size(); ++s)
                out << ',' << fmt(traj.inventory[p][s][t]);
        out << ',' << fmt(traj.beta_plus[t] * per_h) << ',' << fmt(traj.beta_minus[t] * per_h)
            << '\n';
    }
    return out.str();
}

std::string iteration_log_csv(const HorizonState& state, const MoistureSet& levels) {
    std::ostringstream out;
    out << "# feedflow-iterations-v1\n";
    out << "iter";
    for (const auto& l : levels.labels) out << ",T_" << l;
    out << ",feasible,objective\n";
    for (const auto& probe : state.log) {
        out << probe.iteration;
        for (double b : probe.budget_hours) out << ',' << fmt(b);
        out << ',' << (probe.feasible ? 1 : 0) << ',' << fmt(probe.objective) << '\n';
    }
    return out.str();
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Ticks {
    std::vector<double> at;
};

Ticks nice_ticks(double lo, double hi, int target) {
    Ticks t;
    if (!(hi > lo)) hi = lo + 1.0;
    double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    for (double mult : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        if (span / (step * mult) <= target) {
            step *= mult;
            break;
        }
    }
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * span; v += step) t.at.push_back(v);
    return t;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& x,
                           const std::vector<SvgSeries>& series) {
    const double W = 860, H = 420;
    const double ml = 70, mr = 170, mt = 40, mb = 50;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!x.empty()) {
        xmin = *std::min_element(x.begin(), x.end());
        xmax = *std::max_element(x.begin(), x.end());
    }
    bool any = false;
    for (const auto& s : series) {
        for (double v : s.y) {
            if (!any) {
                ymin = ymax = v;
                any = true;
            } else {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    }
    if (!any) ymax = 1.0;
    ymin = std::min(ymin, 0.0);
    if (ymax <= ymin) ymax = ymin + 1.0;
    if (xmax <= xmin) xmax = xmin + 1.0;

    auto X = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double v) { return mt + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"15\">" << title << "</text>\n";

    // Axes and ticks.
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    Ticks tx = nice_ticks(xmin, xmax, 8), ty = nice_ticks(ymin, ymax, 6);
    for (double v : tx.at) {
        out << "<line x1=\"" << fmt(X(v)) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(X(v))
            << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << fmt(X(v)) << "\" y=\"" << mt + ph + 16
            << "\" text-anchor=\"middle\">" << fmt(v) << "</text>\n";
    }
    for (double v : ty.at) {
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << fmt(Y(v)) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << fmt(Y(v)) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(Y(v) + 3.5)
            << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
        << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">"
        << y_label << "</text>\n";
    out << "</g>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        size_t npts = std::min(x.size(), s.y.size());
        for (size_t i = 0; i < npts; ++i) {
            if (i) out << ' ';
            out << fmt(X(x[i])) << ',' << fmt(Y(s.y[i]));
        }
        out << "\"/>\n";
        double ly = mt + 14 + 18.0 * si;
        out << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
            << ml + pw + 34 << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << ml + pw + 40 << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ParseError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace feedflow
