#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/estimators.hpp"
#include "loewner_lab/formulas.hpp"
#include "loewner_lab/growth.hpp"
#include "loewner_lab/io.hpp"
#include "loewner_lab/lattice.hpp"
#include "loewner_lab/loewner.hpp"
#include "loewner_lab/sle.hpp"
#include "loewner_lab/version.hpp"
#include "suites.hpp"

namespace loewner_lab::cli {

namespace {

using json = nlohmann::json;

enum Common : unsigned { kSeed = 1, kThreads = 2, kOut = 4, kSvg = 8 };

struct CommonArgs {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string svg;
    SvgViewport vp;
    std::string config;
};

// Everything a subcommand body needs besides its own options.
struct Run {
    CommonArgs& common;
    std::uint64_t seed = 0;
    json outputs = json::array();

    int threads() const { return common.threads; }

    void write(const std::string& path, const std::string& text) {
        if (path.empty() || path == "-") {
            std::cout << text;
            std::cout.flush();
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw InvalidArgument("cannot open " + path + " for writing");
            f << text;
        }
        outputs.push_back({{"path", path.empty() ? "-" : path}, {"bytes", text.size()}, {"fnv1a64", digest_hex(text)}});
    }
    void primary(const std::string& text) { write(common.out, text); }
    void primary(const json& j) { primary(j.dump(2) + "\n"); }
    bool want_svg() const { return !common.svg.empty(); }
    void svg(const std::string& text) { write(common.svg, text); }
};

using Body = std::function<void(Run&)>;

struct Leaf {
    CLI::App* app;
    Body body;
};

struct Registry {
    CommonArgs common;
    std::vector<Leaf> leaves;

    CLI::App* add(CLI::App& parent, const std::string& name, const std::string& help, unsigned flags, Body body) {
        CLI::App* c = parent.add_subcommand(name, help);
        if (flags & kSeed) c->add_option("--seed", common.seed, "RNG seed (default: derived from the clock, recorded)");
        if (flags & kThreads)
            c->add_option("--threads", common.threads, "worker threads (default: LOEWNER_LAB_THREADS or all cores)")
                ->check(CLI::NonNegativeNumber);
        if (flags & kOut) c->add_option("--out", common.out, "primary output file (default: standard output)");
        if (flags & kSvg) {
            c->add_option("--svg", common.svg, "also render an SVG to this file");
            c->add_option("--width", common.vp.width, "SVG width")->capture_default_str()->check(CLI::PositiveNumber);
            c->add_option("--height", common.vp.height, "SVG height")->capture_default_str()->check(CLI::PositiveNumber);
            c->add_option("--margin", common.vp.margin, "SVG margin")->capture_default_str()->check(CLI::NonNegativeNumber);
        }
        c->add_option("--config", common.config, "key = value file merged under the flags");
        leaves.push_back({c, std::move(body)});
        return c;
    }
};

cplx parse_complex(const std::string& s) {
    std::istringstream is(s);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(is >> re >> comma >> im) || comma != ',') throw InvalidArgument("expected re,im but got '" + s + "'");
    return {re, im};
}

std::vector<cplx> parse_points(const std::vector<std::string>& v) {
    std::vector<cplx> out;
    for (const auto& s : v) out.push_back(parse_complex(s));
    return out;
}

Geometry parse_geometry(const std::string& name, double scale) {
    if (name == "chordal") return Geometry::chordal();
    if (name == "radial") return Geometry::radial(scale);
    if (name == "dipolar") return Geometry::dipolar(scale);
    throw InvalidArgument("unknown geometry " + name);
}

NavigatorVariant parse_variant(const std::string& s) {
    for (auto v : {NavigatorVariant::harmonic, NavigatorVariant::anti, NavigatorVariant::percolation_nav,
                   NavigatorVariant::boundary_harmonic})
        if (s == navigator_name(v)) return v;
    throw InvalidArgument("unknown navigator variant " + s);
}

const std::vector<std::string> kGeometries{"chordal", "radial", "dipolar"};
const std::vector<std::string> kVariants{"harmonic", "anti", "percolation_nav", "boundary_harmonic"};

std::string trace_csv(const TraceSample& t) {
    std::ostringstream os;
    write_trace_csv(os, t);
    return os.str();
}

// ------------------------------------------------------------------ sle

struct SleArgs {
    double kappa = 6.0, T = 1.0, dt = 1e-3, rho = 0.0, scale = 1.0, max_gap = 0.0;
    std::string geometry = "chordal";
};

void add_sle_args(CLI::App* c, SleArgs& a) {
    c->add_option("--kappa", a.kappa, "SLE parameter")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--t", a.T, "final capacity time")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--dt", a.dt, "driving grid step")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--geometry", a.geometry, "chordal, radial or dipolar")
        ->capture_default_str()
        ->check(CLI::IsMember(kGeometries));
    c->add_option("--scale", a.scale, "radial Lambda or dipolar Delta")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--rho", a.rho, "SLE(kappa, rho) in the strip (dipolar geometry only)")->capture_default_str();
}

DrivingPath sample_driving(const SleArgs& a, std::uint64_t seed) {
    SleParams p;
    p.kappa = a.kappa;
    p.rho = a.rho;
    p.geometry = parse_geometry(a.geometry, a.scale);
    p.T = a.T;
    p.dt = a.dt;
    p.seed = seed;
    if (a.rho != 0.0 && p.geometry.kind != GeometryKind::dipolar)
        throw InvalidArgument("--rho needs --geometry dipolar");
    switch (p.geometry.kind) {
        case GeometryKind::chordal: return sample_chordal(p);
        case GeometryKind::radial: return sample_radial(p);
        case GeometryKind::dipolar: return a.rho != 0.0 ? sample_sle_kr(p) : sample_dipolar(p);
    }
    throw InvalidArgument("unreachable geometry");
}

void add_sle(CLI::App& app, Registry& reg) {
    CLI::App* sle = app.add_subcommand("sle", "sample SLE traces and hulls");
    sle->require_subcommand(1);

    auto tr = std::make_shared<SleArgs>();
    CLI::App* c = reg.add(*sle, "trace", "trace CSV (t,re,im) of one sampled path", kSeed | kOut | kSvg, [tr](Run& r) {
        TraceSample t;
        if (tr->max_gap > 0.0) {
            if (tr->geometry != "chordal") throw InvalidArgument("--max-gap is for the chordal geometry");
            SleParams p;
            p.kappa = tr->kappa;
            p.T = tr->T;
            p.dt = tr->dt;
            p.seed = r.seed;
            t = adaptive_chordal_trace(p, tr->max_gap).trace;
        } else {
            t = trace(sample_driving(*tr, r.seed));
        }
        r.primary(trace_csv(t));
        if (r.want_svg()) r.svg(svg_render({SvgLayer{t.points}}, r.common.vp));
    });
    add_sle_args(c, *tr);
    c->add_option("--max-gap", tr->max_gap, "refine the chordal trace until consecutive points are this close")
        ->check(CLI::NonNegativeNumber);

    struct HullArgs : SleArgs {
        double xmin = -2.0, xmax = 2.0, ymax = 2.0;
        int grid = 41;
    };
    auto hu = std::make_shared<HullArgs>();
    c = reg.add(*sle, "hull", "mark which grid points are swallowed by time t (CSV re,im,swallowed,tau)",
                kSeed | kThreads | kOut | kSvg, [hu](Run& r) {
                    const DrivingPath d = sample_driving(*hu, r.seed);
                    const int n = hu->grid;
                    std::vector<cplx> zs;
                    for (int j = 1; j <= n; ++j)
                        for (int i = 0; i < n; ++i)
                            zs.emplace_back(hu->xmin + (hu->xmax - hu->xmin) * i / (n - 1), hu->ymax * j / n);
                    std::vector<SwallowResult> res(zs.size());
                    parallel_for(zs.size(), r.threads(), [&](std::size_t k) { res[k] = forward_map(d, zs[k], hu->T); });
                    std::ostringstream os;
                    os << "re,im,swallowed,tau\n";
                    std::vector<cplx> in;
                    for (std::size_t k = 0; k < zs.size(); ++k) {
                        os << fmt17(zs[k].real()) << ',' << fmt17(zs[k].imag()) << ',' << (res[k].swallowed ? 1 : 0)
                           << ',' << fmt17(res[k].tau) << '\n';
                        if (res[k].swallowed) in.push_back(zs[k]);
                    }
                    r.primary(os.str());
                    if (r.want_svg()) {
                        SvgLayer hull{in, "#c0392b", 1.0, true};
                        r.svg(svg_render({hull, SvgLayer{trace(d).points}}, r.common.vp));
                    }
                });
    add_sle_args(c, *hu);
    c->add_option("--xmin", hu->xmin, "grid left edge")->capture_default_str();
    c->add_option("--xmax", hu->xmax, "grid right edge")->capture_default_str();
    c->add_option("--ymax", hu->ymax, "grid top edge")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--grid", hu->grid, "points per axis")->capture_default_str()->check(CLI::Range(2, 2000));

    struct ClassifyArgs {
        double kappa = 4.0, horizon = 200.0, step_factor = 3e-3;
        std::vector<std::string> z{"0,1.5707963267948966"};
        std::uint64_t paths = 1000;
    };
    auto cl = std::make_shared<ClassifyArgs>();
    c = reg.add(*sle, "classify", "dipolar SLE in the strip of width pi: left/right/inside frequencies per point",
                kSeed | kThreads | kOut, [cl](Run& r) {
                    const auto zs = parse_points(cl->z);
                    DipolarClassifyOptions o;
                    o.horizon = cl->horizon;
                    const auto counts = dipolar_outcome_map(cl->kappa, zs, cl->paths, r.seed, r.threads(), o, cl->step_factor);
                    json rows = json::array();
                    for (std::size_t k = 0; k < zs.size(); ++k) {
                        const double n = static_cast<double>(cl->paths);
                        rows.push_back({{"z", {zs[k].real(), zs[k].imag()}},
                                        {"left", counts[k].left / n},
                                        {"right", counts[k].right / n},
                                        {"inside", counts[k].inside / n},
                                        {"undecided", counts[k].undecided},
                                        {"exact", {{"left", dipolar_left_prob(zs[k], cl->kappa)},
                                                   {"right", dipolar_right_prob(zs[k], cl->kappa)},
                                                   {"inside", dipolar_in_prob(zs[k], cl->kappa)}}}});
                    }
                    r.primary(json{{"kappa", cl->kappa}, {"paths", cl->paths}, {"points", rows}});
                });
    c->add_option("--kappa", cl->kappa, "SLE parameter")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--z", cl->z, "query points re,im with 0 < im < pi (repeatable)")->capture_default_str();
    c->add_option("--paths", cl->paths, "number of sampled paths")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--horizon", cl->horizon, "capacity time limit")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--step-factor", cl->step_factor, "dt = factor * min distance^2")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

// ------------------------------------------------------------------ lattice

std::string hex_output(Run& r, const HexDomain& d, const InterfacePath& p) {
    std::ostringstream os;
    write_points_csv(os, p.vertices);
    if (r.want_svg()) {
        HexDomain coloured = d;
        for (const auto& [h, s] : p.decided) coloured.set(h, s);
        r.svg(svg_hex_render(coloured, &p, r.common.vp));
    }
    return os.str();
}

void add_lattice(CLI::App& app, Registry& reg) {
    CLI::App* lat = app.add_subcommand("lattice", "discrete interfaces and walks");
    lat->require_subcommand(1);

    struct HexArgs {
        int cols = 32, rows = 32;
        std::string variant = "harmonic";
    };
    auto pa = std::make_shared<HexArgs>();
    CLI::App* c = reg.add(*lat, "perc", "percolation exploration in a rectangle (CSV re,im of vertices)",
                          kSeed | kOut | kSvg, [pa](Run& r) {
                              const HexDomain d = HexDomain::rectangle(pa->cols, pa->rows);
                              r.primary(hex_output(r, d, percolation_interface(d, r.seed)));
                          });
    c->add_option("--cols", pa->cols, "rectangle width in hexagons")->capture_default_str()->check(CLI::Range(2, 100000));
    c->add_option("--rows", pa->rows, "rectangle height in hexagons")->capture_default_str()->check(CLI::Range(2, 100000));

    auto na = std::make_shared<HexArgs>();
    c = reg.add(*lat, "navigator", "harmonic navigator and its variants (CSV re,im of vertices)", kSeed | kOut | kSvg,
                [na](Run& r) {
                    const HexDomain d = HexDomain::rectangle(na->cols, na->rows);
                    r.primary(hex_output(r, d, navigator_interface(d, r.seed, parse_variant(na->variant))));
                });
    c->add_option("--cols", na->cols, "rectangle width in hexagons")->capture_default_str()->check(CLI::Range(2, 100000));
    c->add_option("--rows", na->rows, "rectangle height in hexagons")->capture_default_str()->check(CLI::Range(2, 100000));
    c->add_option("--variant", na->variant, "harmonic, anti, percolation_nav or boundary_harmonic")
        ->capture_default_str()
        ->check(CLI::IsMember(kVariants));

    struct LerwArgs {
        int n = 64;
        std::string mode = "bessel3";
        double radius = 64.0;
    };
    auto la = std::make_shared<LerwArgs>();
    c = reg.add(*lat, "lerw", "half-plane loop-erased walk (CSV x,y)", kSeed | kOut | kSvg, [la](Run& r) {
        Rng g(r.seed);
        const LatticeWalk w = la->mode == "bessel3" ? lerw_halfplane(la->n, g) : lerw_reflecting(la->radius, g);
        std::ostringstream os;
        write_sites_csv(os, w.sites);
        r.primary(os.str());
        if (r.want_svg()) {
            std::vector<cplx> pts;
            for (Site s : w.sites) pts.emplace_back(s.x, s.y);
            r.svg(svg_render({SvgLayer{pts}}, r.common.vp));
        }
    });
    c->add_option("--n", la->n, "target altitude (bessel3)")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--mode", la->mode, "bessel3 or reflecting")->capture_default_str()->check(CLI::IsMember({"bessel3", "reflecting"}));
    c->add_option("--radius", la->radius, "exit radius (reflecting)")->capture_default_str()->check(CLI::PositiveNumber);

    struct SawArgs {
        int n = 100;
        std::size_t burn_in = 10000, measurements = 1000, stride = 10;
    };
    auto sa = std::make_shared<SawArgs>();
    c = reg.add(*lat, "saw", "pivot chain statistics for self-avoiding walks (JSON)", kSeed | kOut, [sa](Run& r) {
        Rng g(r.seed);
        const SawStats s = saw_pivot_chain(sa->n, sa->burn_in, sa->measurements, sa->stride, g);
        r.primary(json{{"n", sa->n}, {"mean_r2", s.mean_r2}, {"acceptance", s.acceptance}, {"samples", s.samples}});
    });
    c->add_option("--n", sa->n, "walk length")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--burn-in", sa->burn_in, "pivot moves before measuring")->capture_default_str();
    c->add_option("--measurements", sa->measurements, "number of measurements")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--stride", sa->stride, "pivot moves between measurements")->capture_default_str()->check(CLI::PositiveNumber);
}

// ------------------------------------------------------------------ growth

void add_growth(CLI::App& app, Registry& reg) {
    CLI::App* gr = app.add_subcommand("growth", "Laplacian growth, Hastings-Levitov and DLA");
    gr->require_subcommand(1);

    struct ZnArgs {
        int n = 3;
        double rc = 1.0, t = 0.1, r0 = 0.0, eps_cusp = 1e-3;
    };
    auto zn = std::make_shared<ZnArgs>();
    CLI::App* c = reg.add(*gr, "lg-zn", "Z_n symmetric Laplacian growth at time t (JSON)", kOut, [zn](Run& r) {
        const ZnState s = lg_zn_evolve(zn->n, zn->rc, zn->t, zn->r0, zn->eps_cusp);
        r.primary(json{{"n", zn->n}, {"R", s.R}, {"beta", s.beta}, {"t", s.t},
                       {"cusp_time", lg_zn_cusp_time(zn->n, zn->rc, zn->r0)}});
    });
    c->add_option("--n", zn->n, "symmetry order (>= 3)")->capture_default_str()->check(CLI::Range(3, 1000));
    c->add_option("--rc", zn->rc, "radius R_c at which the cusp forms")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--t", zn->t, "elapsed time")->capture_default_str()->check(CLI::NonNegativeNumber);
    c->add_option("--r0", zn->r0, "initial radius")->capture_default_str()->check(CLI::NonNegativeNumber);
    c->add_option("--eps-cusp", zn->eps_cusp, "stop once 1 - beta drops below this")->capture_default_str();

    struct EvolveArgs {
        std::vector<std::string> coeffs{"1,0", "0,0", "0.05,0"};
        double t = 0.5;
        int steps = 50;
        int points = 512;
    };
    auto ev = std::make_shared<EvolveArgs>();
    c = reg.add(*gr, "lg-evolve",
                "polynomial Laplacian growth; CSV t,area,I0..I2 (re,im) at each output step, then the final boundary as SVG",
                kOut | kSvg, [ev](Run& r) {
                    LgPolyState s;
                    s.coeffs = parse_points(ev->coeffs);
                    if (s.coeffs.empty() || s.coeffs[0].imag() != 0.0 || s.coeffs[0].real() <= 0.0)
                        throw InvalidArgument("the first coefficient must be a positive real radius");
                    std::ostringstream os;
                    os << "t,area,I0_re,I0_im,I1_re,I1_im,I2_re,I2_im\n";
                    auto row = [&] {
                        os << fmt17(s.t) << ',' << fmt17(lg_area(s));
                        for (int k = 0; k < 3; ++k) {
                            const cplx I = lg_conserved(s, k);
                            os << ',' << fmt17(I.real()) << ',' << fmt17(I.imag());
                        }
                        os << '\n';
                    };
                    row();
                    for (int k = 0; k < ev->steps; ++k) {
                        s = lg_general_step(s, ev->t / ev->steps);
                        row();
                    }
                    r.primary(os.str());
                    if (r.want_svg()) {
                        std::vector<cplx> b;
                        for (int k = 0; k <= ev->points; ++k) b.push_back(s.eval(std::polar(1.0, 2.0 * M_PI * k / ev->points)));
                        r.svg(svg_render({SvgLayer{b}}, r.common.vp));
                    }
                });
    c->add_option("--coeff", ev->coeffs, "coefficients f_0, f_1, ... as re,im (repeatable; f_0 real)")->capture_default_str();
    c->add_option("--t", ev->t, "total time")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--steps", ev->steps, "output steps")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--points", ev->points, "boundary points in the SVG")->capture_default_str()->check(CLI::PositiveNumber);

    struct HlArgs {
        std::size_t n = 1000;
        double alpha = 2.0, lambda0 = 0.1;
        std::size_t points = 4000;
    };
    auto hl = std::make_shared<HlArgs>();
    c = reg.add(*gr, "hl", "Hastings-Levitov cluster boundary (CSV re,im)", kSeed | kOut | kSvg, [hl](Run& r) {
        HlCluster cl;
        cl.alpha = hl->alpha;
        cl.lambda0 = hl->lambda0;
        cl = hl_grow(cl, hl->n, r.seed);
        const auto b = hl_boundary(cl, hl->points);
        std::ostringstream os;
        write_points_csv(os, b);
        r.primary(os.str());
        if (r.want_svg()) r.svg(svg_render({SvgLayer{b}}, r.common.vp));
    });
    c->add_option("--n", hl->n, "number of bumps")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--alpha", hl->alpha, "size exponent")->capture_default_str();
    c->add_option("--lambda0", hl->lambda0, "base bump size")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--points", hl->points, "boundary sample points")->capture_default_str()->check(CLI::PositiveNumber);

    auto dn = std::make_shared<std::size_t>(1000);
    c = reg.add(*gr, "dla", "lattice DLA cluster (CSV x,y in attachment order)", kSeed | kOut | kSvg, [dn](Run& r) {
        const DlaCluster cl = lattice_dla(*dn, r.seed);
        std::ostringstream os;
        write_sites_csv(os, cl.sites);
        r.primary(os.str());
        if (r.want_svg()) {
            std::vector<cplx> pts;
            for (Site s : cl.sites) pts.emplace_back(s.x, s.y);
            r.svg(svg_render({SvgLayer{pts, "#1f4e79", 1.0, true}}, r.common.vp));
        }
    });
    c->add_option("--n", *dn, "particles")->capture_default_str()->check(CLI::PositiveNumber);
}

// ------------------------------------------------------------------ oracle

// Rough absolute accuracy of each evaluation route.
constexpr double kClosed = 1e-14;
constexpr double kQuad = 1e-12;
constexpr double kOde = 1e-9;

struct OracleResult {
    json value;
    std::string method;
    double tolerance;
};

void add_oracle(CLI::App& app, Registry& reg) {
    CLI::App* orc = app.add_subcommand("oracle", "evaluate a closed-form prediction (JSON value, method, tolerance)");
    orc->require_subcommand(1);

    // Each oracle only accepts its own flags, so an irrelevant flag is a usage error.
    auto make = [&](const std::string& name, const std::string& help, std::function<OracleResult()> f) {
        return reg.add(*orc, name, help, kOut, [f, name](Run& r) {
            const OracleResult o = f();
            r.primary(json{{"oracle", name}, {"value", o.value}, {"method", o.method}, {"tolerance", o.tolerance}});
        });
    };
    auto num = [](CLI::App* c, const std::string& flag, double& v, const std::string& help) {
        c->add_option(flag, v, help)->required();
    };
    struct Vals {
        double x = 0, X = 0, a = 0, b = 0, r = 0, kappa = 0, rho = 0, re = 0, im = 0, n = 0, alpha = 0, m = 0,
               p1 = 1, p2 = 1, rc = 1, r0 = 0, lambda = 1;
        int order = 1, n_max = 30;
        std::string which = "I";
        std::vector<double> matrix;
    };
    auto v = std::make_shared<Vals>();

    CLI::App* c = make("cardy-triangle", "crossing probability in the equilateral triangle",
                       [v] { return OracleResult{cardy_triangle(v->x), "closed form", kClosed}; });
    num(c, "--x", v->x, "fraction of the far side");
    c = make("cardy-halfplane", "P[a swallowed before b], 4 < kappa < 8",
             [v] { return OracleResult{cardy_halfplane(v->a, v->b, v->kappa), "tanh-sinh quadrature", kQuad}; });
    num(c, "--a", v->a, "left point (< 0)");
    num(c, "--b", v->b, "right point (> 0)");
    num(c, "--kappa", v->kappa, "SLE parameter");
    c = make("cardy-rectangle", "top-bottom crossing of a rectangle with aspect ratio r",
             [v] { return OracleResult{cardy_rectangle(v->r), "elliptic modulus by AGM, then quadrature", kQuad}; });
    num(c, "--r", v->r, "width / height");
    c = make("hitting", "P[SLE does not touch [x, X]], 4 < kappa < 8",
             [v] { return OracleResult{hitting_prob(v->x, v->X, v->kappa), "tanh-sinh quadrature", kQuad}; });
    num(c, "--x", v->x, "near end");
    num(c, "--X", v->X, "far end");
    num(c, "--kappa", v->kappa, "SLE parameter");
    for (const std::string side : {"left", "right", "in"}) {
        const std::string help = side == "in" ? "dipolar SLE: probability that z is swallowed by the hull"
                                              : "dipolar SLE: probability that z is passed on the " + side;
        c = make("dipolar-" + side, help,
                 [v, side] {
                     const cplx z(v->re, v->im);
                     const double p = side == "left"    ? dipolar_left_prob(z, v->kappa)
                                      : side == "right" ? dipolar_right_prob(z, v->kappa)
                                                        : dipolar_in_prob(z, v->kappa);
                     return OracleResult{p, "quadrature of the boundary harmonic measure", kQuad};
                 });
        num(c, "--re", v->re, "Re z");
        num(c, "--im", v->im, "Im z in (0, pi)");
        num(c, "--kappa", v->kappa, "SLE parameter");
    }
    c = make("dipolar-exit-density", "density of the exit point on the upper boundary",
             [v] { return OracleResult{dipolar_exit_density(v->x, v->kappa), "closed form over quadrature constant", kQuad}; });
    num(c, "--x", v->x, "exit abscissa");
    num(c, "--kappa", v->kappa, "SLE parameter");
    c = make("restriction", "P[SLE_8/3 avoids the half disc of radius r about x]",
             [v] { return OracleResult{restriction_prob_semidisc(v->x, v->r), "closed form", kClosed}; });
    num(c, "--x", v->x, "centre");
    num(c, "--r", v->r, "radius");
    c = make("central-charge", "c(kappa)", [v] { return OracleResult{central_charge(v->kappa), "closed form", kClosed}; });
    num(c, "--kappa", v->kappa, "SLE parameter");
    c = make("cft", "conformal weights and dimensions for kappa (and rho)", [v] {
        const CftData d = cft_data(v->kappa, v->rho);
        return OracleResult{json{{"c", d.c}, {"h12", d.h12}, {"h13", d.h13}, {"h0_half", d.h0_half},
                                 {"h_plus", d.h_plus}, {"h_minus", d.h_minus}, {"d_kappa", d.d_kappa}},
                            "closed form", kClosed};
    });
    num(c, "--kappa", v->kappa, "SLE parameter");
    c->add_option("--rho", v->rho, "SLE(kappa, rho) parameter")->capture_default_str();
    c = make("multifractal-tau", "harmonic measure multifractal exponent tau(n)",
             [v] { return OracleResult{multifractal_tau(v->n, v->kappa), "closed form", kClosed}; });
    num(c, "--n", v->n, "moment order");
    num(c, "--kappa", v->kappa, "SLE parameter");
    c = make("multifractal-f", "multifractal spectrum f(alpha), alpha > 1/2",
             [v] { return OracleResult{multifractal_f(v->alpha, v->kappa), "closed form", kClosed}; });
    num(c, "--alpha", v->alpha, "singularity exponent");
    num(c, "--kappa", v->kappa, "SLE parameter");
    c = make("arch", "four-point arch partition function Z_I or Z_II", [v] {
        return OracleResult{arch_partition(v->x, v->kappa, v->which == "I" ? ArchConfig::I : ArchConfig::II),
                            "hypergeometric ODE integrated by Runge-Kutta", kOde};
    });
    num(c, "--x", v->x, "cross ratio in (0, 1)");
    num(c, "--kappa", v->kappa, "SLE parameter");
    c->add_option("--which", v->which, "I or II")->capture_default_str()->check(CLI::IsMember({"I", "II"}));
    c = make("arch-prob", "probability of arch configuration I", [v] {
        return OracleResult{arch_prob_I(v->x, v->kappa, v->p1, v->p2), "hypergeometric ODE integrated by Runge-Kutta", kOde};
    });
    num(c, "--x", v->x, "cross ratio in (0, 1)");
    num(c, "--kappa", v->kappa, "SLE parameter");
    c->add_option("--p-I", v->p1, "weight of configuration I")->capture_default_str();
    c->add_option("--p-II", v->p2, "weight of configuration II")->capture_default_str();
    c = make("elliptic-k", "complete elliptic integral K(m), parameter m = k^2",
             [v] { return OracleResult{elliptic_k(v->m), "arithmetic-geometric mean", kClosed}; });
    num(c, "--m", v->m, "parameter");
    c = make("sle-kr-drift", "drift of the strip driving function of SLE(kappa, rho)",
             [v] { return OracleResult{sle_kr_drift(v->kappa, v->rho), "closed form", kClosed}; });
    num(c, "--kappa", v->kappa, "SLE parameter");
    num(c, "--rho", v->rho, "rho");
    c = make("brownian-zeta", "Brownian intersection exponents zeta_n and tilde zeta_n", [v] {
        return OracleResult{json{{"zeta", brownian_zeta(v->order)}, {"zeta_tilde", brownian_zeta_tilde(v->order)}},
                            "closed form", kClosed};
    });
    c->add_option("--n", v->order, "number of walks")->required();
    c = make("lg-zn-cusp", "cusp time of the Z_n Laplacian growth solution",
             [v] { return OracleResult{lg_zn_cusp_time(v->order, v->rc, v->r0), "closed form", kClosed}; });
    c->add_option("--n", v->order, "symmetry order")->required();
    num(c, "--rc", v->rc, "cusp radius");
    c->add_option("--r0", v->r0, "initial radius")->capture_default_str();

    auto matrix_of = [v] {
        const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v->matrix.size()))));
        if (d < 1 || static_cast<std::size_t>(d * d) != v->matrix.size())
            throw InvalidArgument("--matrix needs d*d row-major entries");
        return WeightMatrix{d, v->matrix};
    };
    c = make("loop-series", "truncated loop measure total mass with its remainder bound", [v, matrix_of] {
        const LoopSeries s = loop_measure_total(matrix_of(), v->alpha, v->lambda, v->n_max);
        return OracleResult{s.value, "truncated trace series", s.remainder_bound};
    });
    c->add_option("--matrix", v->matrix, "row-major square matrix entries")->required()->delimiter(',');
    num(c, "--alpha", v->alpha, "fugacity");
    c->add_option("--lambda", v->lambda, "intensity")->capture_default_str();
    c->add_option("--n-max", v->n_max, "series truncation")->capture_default_str()->check(CLI::PositiveNumber);
    c = make("loop-logdet", "-lambda log det(1 - alpha A)", [v, matrix_of] {
        return OracleResult{loop_log_det_total(matrix_of(), v->alpha, v->lambda), "LU determinant", kClosed};
    });
    c->add_option("--matrix", v->matrix, "row-major square matrix entries")->required()->delimiter(',');
    num(c, "--alpha", v->alpha, "fugacity");
    c->add_option("--lambda", v->lambda, "intensity")->capture_default_str();
}

// ------------------------------------------------------------------ estimate

std::vector<std::size_t> broadcast(std::vector<std::size_t> v, std::size_t n) {
    if (v.size() == 1) v.assign(n, v.front());
    if (v.size() != n) throw InvalidArgument("--samples needs one entry, or one per size");
    return v;
}

json estimate_json(const McEstimate& e, double exact) {
    json j = to_json(e);
    j["exact"] = exact;
    j["z_score"] = e.trials > 0 ? (e.p_hat - exact) / std::sqrt(std::max(exact * (1.0 - exact), 1e-300) / e.trials) : 0.0;
    return j;
}

void add_estimate(CLI::App& app, Registry& reg) {
    CLI::App* est = app.add_subcommand("estimate", "Monte Carlo estimators (JSON)");
    est->require_subcommand(1);

    struct DimArgs {
        std::string model = "perc";
        std::vector<int> sizes{16, 32, 64, 128};
        std::vector<std::size_t> samples{200};
        std::string variant = "harmonic";
        double kappa = 4.0, max_gap = 0.004, dt = 1e-4;
        std::size_t paths = 10;
    };
    auto da = std::make_shared<DimArgs>();
    CLI::App* c = reg.add(*est, "dim", "fractal dimension by size sweep or box counting", kSeed | kThreads | kOut,
                          [da](Run& r) {
                              FitReport f;
                              const std::string& m = da->model;
                              if (m == "sle") {
                                  std::vector<std::vector<cplx>> traces(da->paths);
                                  parallel_for(da->paths, r.threads(), [&](std::size_t i) {
                                      SleParams p;
                                      p.kappa = da->kappa;
                                      p.dt = da->dt;
                                      p.seed = Rng::mix64(r.seed) + i;
                                      traces[i] = adaptive_chordal_trace(p, da->max_gap).trace.points;
                                  });
                                  // same window rule as the acceptance suite: 4 gaps to a tenth of the diameter 2 sqrt(T)
                                  const double lo = 4.0 * da->max_gap, hi = 0.2;
                                  std::vector<double> eps;
                                  for (int k = 0; k < 10; ++k) eps.push_back(lo * std::pow(hi / lo, k / 9.0));
                                  f = trace_dimension(traces, eps);
                              } else {
                                  const auto per = broadcast(da->samples, da->sizes.size());
                                  const NavigatorVariant var = parse_variant(da->variant);
                                  f = dimension_sweep(
                                      da->sizes, per,
                                      [&](int L, Rng& g) -> double {
                                          if (m == "perc") return percolation_interface(HexDomain::rectangle(L, L), g).length();
                                          if (m == "navigator")
                                              return navigator_interface(HexDomain::rectangle(L, L), g, var).length();
                                          return lerw_halfplane(L, g).length();
                                      },
                                      r.seed, r.threads());
                              }
                              json j = to_json(f);
                              j["model"] = m;
                              if (m == "sle") j["expected"] = 1.0 + da->kappa / 8.0;
                              r.primary(j);
                          });
    c->add_option("--model", da->model, "perc, navigator, lerw or sle")
        ->capture_default_str()
        ->check(CLI::IsMember({"perc", "navigator", "lerw", "sle"}));
    c->add_option("--sizes", da->sizes, "system sizes (lattice models)")->capture_default_str()->delimiter(',');
    c->add_option("--samples", da->samples, "samples per size, one value or one per size")->capture_default_str()->delimiter(',');
    c->add_option("--variant", da->variant, "navigator variant")->capture_default_str()->check(CLI::IsMember(kVariants));
    c->add_option("--kappa", da->kappa, "SLE parameter (sle model)")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--paths", da->paths, "traces (sle model)")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--max-gap", da->max_gap, "trace refinement gap (sle model)")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--dt", da->dt, "driving grid step (sle model)")->capture_default_str()->check(CLI::PositiveNumber);

    struct CrossArgs {
        std::string model = "triangle";
        int n = 128;
        std::vector<double> x{0.2, 0.5, 0.8};
        double kappa = 6.0, a = -1.0, b = 1.0;
        std::uint64_t samples = 2000;
    };
    auto ca = std::make_shared<CrossArgs>();
    c = reg.add(*est, "crossing", "crossing probabilities: triangle percolation or SLE in the half plane",
                kSeed | kThreads | kOut, [ca](Run& r) {
                    if (ca->model == "triangle") {
                        std::vector<double> reach(ca->samples);
                        parallel_for(ca->samples, r.threads(), [&](std::size_t i) {
                            Rng g = Rng::substream(r.seed, i);
                            reach[i] = triangle_crossing_reach(ca->n, g);
                        });
                        json rows = json::array();
                        for (double x : ca->x) {
                            std::uint64_t k = 0;
                            for (double v : reach) k += v <= x ? 1 : 0;
                            json row = estimate_json(wilson_estimate(k, ca->samples), cardy_triangle(x));
                            row["x"] = x;
                            rows.push_back(row);
                        }
                        r.primary(json{{"model", "triangle"}, {"n", ca->n}, {"results", rows}});
                    } else {
                        const McEstimate e = mc_probability(
                            [&](Rng& g) { return cardy_event(ca->kappa, ca->a, ca->b, g); }, ca->samples, r.seed, r.threads());
                        r.primary(json{{"model", "halfplane"},
                                       {"result", estimate_json(e, cardy_halfplane(ca->a, ca->b, ca->kappa))}});
                    }
                });
    c->add_option("--model", ca->model, "triangle or halfplane")->capture_default_str()->check(CLI::IsMember({"triangle", "halfplane"}));
    c->add_option("--n", ca->n, "triangle side (triangle)")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--x", ca->x, "far-side fractions (triangle)")->capture_default_str()->delimiter(',');
    c->add_option("--kappa", ca->kappa, "SLE parameter (halfplane)")->capture_default_str();
    c->add_option("--a", ca->a, "left point (halfplane)")->capture_default_str();
    c->add_option("--b", ca->b, "right point (halfplane)")->capture_default_str();
    c->add_option("--samples", ca->samples, "samples")->capture_default_str()->check(CLI::PositiveNumber);

    struct HitArgs {
        double kappa = 6.0, x = 1.0, X = 2.0;
        std::uint64_t paths = 5000;
    };
    auto ha = std::make_shared<HitArgs>();
    c = reg.add(*est, "hitting", "P[SLE touches [x, X]]", kSeed | kThreads | kOut, [ha](Run& r) {
        const McEstimate e =
            mc_probability([&](Rng& g) { return hitting_event(ha->kappa, ha->x, ha->X, g); }, ha->paths, r.seed, r.threads());
        const bool closed = ha->kappa > 4.0 && ha->kappa < 8.0;
        json j = closed ? estimate_json(e, 1.0 - hitting_prob(ha->x, ha->X, ha->kappa)) : to_json(e);
        r.primary(json{{"kappa", ha->kappa}, {"x", ha->x}, {"X", ha->X}, {"touch", j}});
    });
    c->add_option("--kappa", ha->kappa, "SLE parameter (< 8)")->capture_default_str();
    c->add_option("--x", ha->x, "near end")->capture_default_str();
    c->add_option("--X", ha->X, "far end")->capture_default_str();
    c->add_option("--paths", ha->paths, "paths")->capture_default_str()->check(CLI::PositiveNumber);

    struct LeftArgs {
        double kappa = 4.0;
        std::vector<std::string> z{"0,1.5707963267948966"};
        std::uint64_t paths = 2000;
    };
    auto lp = std::make_shared<LeftArgs>();
    c = reg.add(*est, "leftpass", "dipolar left-passage probability against the exact law", kSeed | kThreads | kOut,
                [lp](Run& r) {
                    const auto zs = parse_points(lp->z);
                    const auto counts = dipolar_outcome_map(lp->kappa, zs, lp->paths, r.seed, r.threads());
                    json rows = json::array();
                    for (std::size_t k = 0; k < zs.size(); ++k) {
                        json row = estimate_json(wilson_estimate(counts[k].left, lp->paths), dipolar_left_prob(zs[k], lp->kappa));
                        row["z"] = {zs[k].real(), zs[k].imag()};
                        rows.push_back(row);
                    }
                    r.primary(json{{"kappa", lp->kappa}, {"results", rows}});
                });
    c->add_option("--kappa", lp->kappa, "SLE parameter")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--z", lp->z, "query points re,im (repeatable)")->capture_default_str();
    c->add_option("--paths", lp->paths, "paths")->capture_default_str()->check(CLI::PositiveNumber);
}

// ------------------------------------------------------------------ verify

void add_verify(CLI::App& app, Registry& reg) {
    struct VerifyArgs {
        std::string suite;
        std::uint64_t samples = 0;
    };
    auto va = std::make_shared<VerifyArgs>();
    std::vector<std::string> names{"all"};
    for (const auto& s : suites::suite_list()) names.push_back(s.name);
    CLI::App* c = reg.add(app, "verify", "run an acceptance suite; text report on stdout, JSON report to --out",
                          kSeed | kThreads | kOut, [va](Run& r) {
                              suites::SuiteOptions o;
                              o.seed = r.seed;
                              o.samples = va->samples;
                              o.threads = r.threads();
                              json reports = json::array();
                              bool ok = true;
                              for (const auto& s : suites::suite_list()) {
                                  if (va->suite != "all" && va->suite != s.name) continue;
                                  const auto rep = suites::run_suite(s.name, o);
                                  std::cout << suites::format_report(rep) << std::flush;
                                  reports.push_back(suites::to_json(rep));
                                  ok = ok && rep.pass();
                              }
                              if (!r.common.out.empty()) r.primary(json{{"pass", ok}, {"seed", r.seed}, {"build", kBuild}, {"suites", reports}});
                              if (!ok) throw Undecided("verification failed");
                          });
    c->add_option("--suite", va->suite, "suite name or all")->required()->check(CLI::IsMember(names));
    c->add_option("--samples", va->samples, "override the suite's sample count (0 keeps the plan)")->capture_default_str();
}

// ------------------------------------------------------------------ plumbing

CLI::App* selected_leaf(CLI::App* app) {
    for (;;) {
        const auto subs = app->get_subcommands();
        if (subs.empty()) return app;
        app = subs.front();
    }
}

std::string full_name(const CLI::App* a) {
    std::string s;
    for (; a != nullptr && a->get_parent() != nullptr; a = a->get_parent()) s = a->get_name() + (s.empty() ? "" : " " + s);
    return s;
}

// Values from a key = value file fill options the command line left unset.
void merge_config(CLI::App* leaf, const std::string& path) {
    const auto items = CLI::ConfigINI().from_file(path);
    for (const auto& it : items) {
        if (!it.parents.empty() && !(it.parents.size() == 1 && it.parents[0] == "default"))
            throw CLI::ConfigError("sections are not supported in " + path + ": " + it.fullname());
        if (it.name == "config") throw CLI::ConfigError("--config cannot be nested");
        CLI::Option* opt = leaf->get_option_no_throw("--" + it.name);
        if (opt == nullptr) throw CLI::ConfigError("unknown key '" + it.name + "' in " + path);
        if (opt->count() > 0) continue;
        opt->add_result(it.inputs);
        opt->run_callback();
    }
}

json params_of(const CLI::App* leaf) {
    json p = json::object();
    for (const CLI::Option* o : leaf->get_options()) {
        const std::string name = o->get_single_name();
        if (name == "help" || name == "config") continue;
        if (o->count() > 0) {
            const auto& res = o->results();
            p[name] = res.size() == 1 ? json(res.front()) : json(res);
        } else if (!o->get_default_str().empty()) {
            p[name] = o->get_default_str();
        }
    }
    return p;
}

std::uint64_t clock_seed() {
    const auto t = std::chrono::system_clock::now().time_since_epoch();
    return Rng::mix64(static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t).count()));
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"Loewner chains, SLE samplers, lattice interfaces and growth models", "loewner-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Registry reg;
    add_sle(app, reg);
    add_lattice(app, reg);
    add_growth(app, reg);
    add_oracle(app, reg);
    add_estimate(app, reg);
    add_verify(app, reg);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    CLI::App* leaf = nullptr;
    try {
        app.parse(rev);
        leaf = selected_leaf(&app);
        if (!reg.common.config.empty()) merge_config(leaf, reg.common.config);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return 2;
    }

    const auto it = std::find_if(reg.leaves.begin(), reg.leaves.end(), [&](const Leaf& l) { return l.app == leaf; });
    if (it == reg.leaves.end()) {
        std::cerr << leaf->help();
        return 2;
    }

    const CLI::Option* seed_opt = leaf->get_option_no_throw("--seed");
    Run run{reg.common};
    run.seed = seed_opt != nullptr && seed_opt->count() > 0 ? reg.common.seed : clock_seed();

    int code = 0;
    std::string error;
    try {
        it->body(run);
    } catch (const InvalidArgument& e) {
        code = 2;
        error = e.what();
    } catch (const DomainError& e) {
        code = 2;
        error = e.what();
    } catch (const std::exception& e) {
        // CuspReached, StepFailure and friends
        code = 1;
        error = e.what();
    }
    if (!error.empty()) std::cerr << "loewner-lab: " << error << "\n";

    json manifest{{"tool", "loewner-lab"},
                  {"version", kVersion},
                  {"build", kBuild},
                  {"argv", args},
                  {"command", full_name(leaf)},
                  {"seed", run.seed},
                  {"threads", resolve_threads(reg.common.threads)},
                  {"params", params_of(leaf)},
                  {"config", reg.common.config},
                  {"outputs", run.outputs},
                  {"exit_code", code},
                  {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    if (seed_opt == nullptr) manifest.erase("seed");
    std::cerr << manifest.dump() << "\n";
    return code;
}

}  // namespace loewner_lab::cli
