#include "shelf/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "shelf/errors.hpp"

namespace shelf {

namespace {

bool host_little_endian() {
  const std::uint16_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  return b == 1;
}

void byteswap(float& f) {
  unsigned char b[4];
  std::memcpy(b, &f, 4);
  std::swap(b[0], b[3]);
  std::swap(b[1], b[2]);
  std::memcpy(&f, b, 4);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ShelfError("cannot open " + path + " for writing");
  return f;
}

}  // namespace

void write_pfm(const std::string& path, const FloatImage& img) {
  auto f = open_out(path);
  f << "Pf\n" << img.width << ' ' << img.height << "\n-1.0\n";
  std::vector<float> row(img.width);
  const bool swap = !host_little_endian();
  for (int y = img.height - 1; y >= 0; --y) {
    std::copy_n(img.pixels.begin() + static_cast<std::ptrdiff_t>(y) * img.width, img.width, row.begin());
    if (swap) for (float& v : row) byteswap(v);
    f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!f) throw ShelfError("write failed: " + path);
}

FloatImage read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ShelfError("cannot open " + path);
  std::string magic;
  FloatImage img;
  double scale = 0.0;
  f >> magic >> img.width >> img.height >> scale;
  if (magic != "Pf" || img.width <= 0 || img.height <= 0 || scale == 0.0) throw ShelfError("not a grayscale PFM: " + path);
  f.get();  // single whitespace before the raster
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  const bool swap = (scale < 0.0) != host_little_endian();
  for (int y = img.height - 1; y >= 0; --y) {
    float* row = img.pixels.data() + static_cast<std::ptrdiff_t>(y) * img.width;
    f.read(reinterpret_cast<char*>(row), static_cast<std::streamsize>(img.width * sizeof(float)));
    if (swap) for (int x = 0; x < img.width; ++x) byteswap(row[x]);
  }
  if (!f) throw ShelfError("truncated PFM: " + path);
  return img;
}

void write_pgm(const std::string& path, const FloatImage& img) {
  float lo = INFINITY, hi = -INFINITY;
  for (float v : img.pixels)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::vector<unsigned char> bytes(img.pixels.size(), 0);
  if (lo <= hi) {
    const float span = hi > lo ? hi - lo : 1.0f;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const float v = img.pixels[i];
      if (std::isfinite(v)) bytes[i] = static_cast<unsigned char>(std::lround(255.0f * (v - lo) / span));
    }
  }
  auto f = open_out(path);
  f << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ShelfError("write failed: " + path);
}

FloatImage depth_image(const DepthRaster& r) { return {r.width, r.height, r.depth}; }

std::string overhead_svg(const Scene& scene, const SimplePolygon& visible, const HiddenPlacementSet& hidden) {
  // 1 px per mm; the camera's floor point sits below the shelf front.
  const double s = 1000.0;
  const double margin = 20.0;
  const Point2 vp = scene.camera.floor_point();
  const double z_lo = std::min(0.0, vp.y);
  const double w = scene.shelf.width * s + 2 * margin;
  const double h = (scene.shelf.depth - z_lo) * s + 2 * margin;
  auto px = [&](Point2 p) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.1f,%.1f", margin + p.x * s, margin + (scene.shelf.depth - p.y) * s);
    return std::string(buf);
  };
  auto poly = [&](const std::vector<Point2>& pts, const char* style) {
    std::string out = "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out += (i ? " " : "") + px(pts[i]);
    return out + "\" style=\"" + style + "\"/>\n";
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  o << poly(scene.shelf.floor_rect().vertices(), "fill:#f4f4f4;stroke:#000;stroke-width:2");
  o << poly(visible.vertices, "fill:#fff3b0;fill-opacity:0.7;stroke:#c9a400");
  const double cell = hidden.grid.spacing * s;
  for (int i : hidden.hidden) {
    const Point2 c = hidden.grid.center(i);
    const Point2 corner{c.x - hidden.grid.spacing / 2, c.y + hidden.grid.spacing / 2};
    o << "<rect x=\"" << margin + corner.x * s << "\" y=\"" << margin + (scene.shelf.depth - corner.y) * s
      << "\" width=\"" << cell << "\" height=\"" << cell << "\" style=\"fill:#d62728;fill-opacity:0.35\"/>\n";
  }
  for (const auto& obj : scene.objects)
    o << poly(obj.footprint.vertices(), "fill:#4c72b0;fill-opacity:0.8;stroke:#1f3b66");
  if (scene.target) o << poly(scene.target->footprint().vertices(), "fill:#2ca02c;stroke:#145214");
  const auto c = px(vp);
  const auto comma = c.find(',');
  o << "<circle cx=\"" << c.substr(0, comma) << "\" cy=\"" << c.substr(comma + 1) << "\" r=\"5\" style=\"fill:#000\"/>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace shelf
