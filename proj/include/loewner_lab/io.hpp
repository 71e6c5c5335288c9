#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "loewner_lab/estimators.hpp"
#include "loewner_lab/growth.hpp"
#include "loewner_lab/lattice.hpp"
#include "loewner_lab/loewner.hpp"

namespace loewner_lab {

// 17 significant digits, enough to round-trip a double.
std::string fmt17(double v);

void write_trace_csv(std::ostream& os, const TraceSample& tr);                 // t,re,im
void write_points_csv(std::ostream& os, const std::vector<std::complex<double>>& pts);  // re,im
void write_sites_csv(std::ostream& os, const std::vector<Site>& sites);        // x,y

struct SvgViewport {
    double width = 800.0;
    double height = 600.0;
    double margin = 20.0;
};

struct SvgLayer {
    std::vector<std::complex<double>> points;
    std::string stroke = "#1f4e79";
    double stroke_width = 1.0;
    bool dots = false;  // draw points as small circles instead of a polyline
};

// Fits all layers into the viewport with a common aspect-preserving scale;
// the imaginary axis points up.
std::string svg_render(const std::vector<SvgLayer>& layers, const SvgViewport& vp = {});

// Hexagon tiling coloured by current state, with the interface on top.
std::string svg_hex_render(const HexDomain& d, const InterfacePath* path, const SvgViewport& vp = {});

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const McEstimate& e);
nlohmann::json to_json(const LgPolyState& s);

// FNV-1a 64-bit of a byte string, hex encoded. Used for output digests.
std::string digest_hex(const std::string& bytes);

}  // namespace loewner_lab
