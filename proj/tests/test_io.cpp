#include <doctest.h>

#include <sstream>

#include "loewner_lab/io.hpp"

using namespace loewner_lab;

TEST_CASE("17 digits round trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(fmt17(v)) == v);
}

TEST_CASE("CSV writers") {
    TraceSample t;
    t.points = {{0.0, 0.0}, {0.5, 1.25}};
    t.times = {0.0, 0.1};
    std::ostringstream os;
    write_trace_csv(os, t);
    CHECK(os.str().rfind("t,re,im\n", 0) == 0);
    int lines = 0;
    for (char c : os.str()) lines += c == '\n';
    CHECK(lines == 3);

    std::ostringstream s;
    write_sites_csv(s, {{1, 2}, {-3, 4}});
    CHECK(s.str() == "x,y\n1,2\n-3,4\n");
}

TEST_CASE("SVG output honours the viewport") {
    SvgViewport vp;
    vp.width = 300;
    vp.height = 200;
    const std::string svg = svg_render({SvgLayer{{{0.0, 0.0}, {1.0, 1.0}}}}, vp);
    CHECK(svg.find("width=\"300\"") != std::string::npos);
    CHECK(svg.find("height=\"200\"") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("digest") {
    CHECK(digest_hex("") == "cbf29ce484222325");
    CHECK(digest_hex("a") == "af63dc4c8601ec8c");
    CHECK(digest_hex("abc") != digest_hex("abd"));
}
