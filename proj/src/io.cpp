#include "loewner_lab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace loewner_lab {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& os, const TraceSample& tr) {
    os << "t,re,im\n";
    for (std::size_t k = 0; k < tr.points.size(); ++k)
        os << fmt17(tr.times[k]) << ',' << fmt17(tr.points[k].real()) << ',' << fmt17(tr.points[k].imag()) << '\n';
}

void write_points_csv(std::ostream& os, const std::vector<std::complex<double>>& pts) {
    os << "re,im\n";
    for (const auto& p : pts) os << fmt17(p.real()) << ',' << fmt17(p.imag()) << '\n';
}

void write_sites_csv(std::ostream& os, const std::vector<Site>& sites) {
    os << "x,y\n";
    for (const auto& s : sites) os << s.x << ',' << s.y << '\n';
}

namespace {

struct Frame {
    double x0, y1, scale, ox, oy;
    std::complex<double> map(std::complex<double> p) const {
        return {ox + (p.real() - x0) * scale, oy + (y1 - p.imag()) * scale};
    }
};

Frame fit_frame(const std::vector<std::complex<double>>& all, const SvgViewport& vp) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& p : all) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    if (!std::isfinite(x0)) x0 = x1 = y0 = y1 = 0.0;
    const double w = std::max(x1 - x0, 1e-12), h = std::max(y1 - y0, 1e-12);
    const double aw = std::max(vp.width - 2.0 * vp.margin, 1.0), ah = std::max(vp.height - 2.0 * vp.margin, 1.0);
    const double s = std::min(aw / w, ah / h);
    return {x0, y1, s, vp.margin + 0.5 * (aw - s * w), vp.margin + 0.5 * (ah - s * h)};
}

void svg_open(std::ostringstream& os, const SvgViewport& vp) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << vp.width << "\" height=\"" << vp.height
       << "\" viewBox=\"0 0 " << vp.width << ' ' << vp.height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string svg_render(const std::vector<SvgLayer>& layers, const SvgViewport& vp) {
    std::vector<std::complex<double>> all;
    for (const auto& l : layers) all.insert(all.end(), l.points.begin(), l.points.end());
    const Frame f = fit_frame(all, vp);
    std::ostringstream os;
    svg_open(os, vp);
    for (const auto& l : layers) {
        if (l.dots) {
            const double rad = std::max(0.5, 0.5 * l.stroke_width);
            for (const auto& p : l.points) {
                const auto q = f.map(p);
                os << "<circle cx=\"" << coord(q.real()) << "\" cy=\"" << coord(q.imag()) << "\" r=\"" << rad
                   << "\" fill=\"" << l.stroke << "\"/>\n";
            }
            continue;
        }
        os << "<polyline fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << l.stroke_width
           << "\" points=\"";
        for (const auto& p : l.points) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
            const auto q = f.map(p);
            os << coord(q.real()) << ',' << coord(q.imag()) << ' ';
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_hex_render(const HexDomain& d, const InterfacePath* path, const SvgViewport& vp) {
    const auto cells = d.cells();
    std::vector<std::complex<double>> all;
    const double rad = 1.0;  // centre-to-corner distance for unit hex spacing
    for (const Hex& h : cells) {
        const auto c = hex_center(h);
        all.push_back(c + std::complex<double>(rad, rad));
        all.push_back(c - std::complex<double>(rad, rad));
    }
    const Frame f = fit_frame(all, vp);
    std::ostringstream os;
    svg_open(os, vp);
    for (const Hex& h : cells) {
        const auto c = hex_center(h);
        const char* fill = "#dddddd";
        switch (d.state(h)) {
            case HexState::black: fill = "#222222"; break;
            case HexState::white: fill = "#f4f4f4"; break;
            default: break;
        }
        os << "<polygon fill=\"" << fill << "\" stroke=\"#999999\" stroke-width=\"0.5\" points=\"";
        for (int k = 0; k < 6; ++k) {
            // pointy-top hexagon
            const double a = M_PI / 6.0 + k * M_PI / 3.0;
            const auto q = f.map(c + rad * std::complex<double>(std::cos(a), std::sin(a)));
            os << coord(q.real()) << ',' << coord(q.imag()) << ' ';
        }
        os << "\"/>\n";
    }
    if (path != nullptr && !path->vertices.empty()) {
        os << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
        for (const auto& p : path->vertices) {
            const auto q = f.map(p);
            os << coord(q.real()) << ',' << coord(q.imag()) << ' ';
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

nlohmann::json to_json(const FitReport& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        nlohmann::json p = {{"log_size", r.points[i].first}, {"log_mean", r.points[i].second}};
        if (i < r.point_errors.size()) p["error"] = r.point_errors[i];
        pts.push_back(p);
    }
    return {{"exponent", r.exponent},
            {"stderr", r.std_error},
            {"intercept", r.intercept},
            {"r_squared", r.r_squared},
            {"points", pts}};
}

nlohmann::json to_json(const McEstimate& e) {
    return {{"successes", e.successes}, {"trials", e.trials}, {"p_hat", e.p_hat},
            {"ci_low", e.ci_low},       {"ci_high", e.ci_high}, {"sigma", e.sigma()}};
}

nlohmann::json to_json(const LgPolyState& s) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& f : s.coeffs) c.push_back({f.real(), f.imag()});
    return {{"t", s.t}, {"coeffs", c}};
}

std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace loewner_lab
