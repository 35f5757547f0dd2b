#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "brt/cli.hpp"

namespace brt::cli {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {

constexpr double kSize = 600.0;

struct View {
  double x0, y0, scale;
  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return kSize - (y - y0) * scale; }
};

View view_of(const geometry::Curve& outer) {
  const double R = outer.max_radius() * 1.05;
  const auto c = outer.center();
  return {c.x() - R, c.y() - R, kSize / (2 * R)};
}

void polyline(std::ostringstream& os, const View& v, const std::vector<geometry::Vec2>& pts, const char* style) {
  os << "<polyline fill=\"none\" " << style << " points=\"";
  for (const auto& p : pts) os << fmt::format("{:.3f},{:.3f} ", v.px(p.x()), v.py(p.y()));
  os << "\"/>\n";
}

std::vector<geometry::Vec2> closed(const geometry::Curve& c) {
  auto pts = c.sample(256);
  std::vector<geometry::Vec2> out;
  for (const auto& b : pts) out.push_back(b);
  out.push_back(out.front());
  return out;
}

}  // namespace

std::string rays_svg(const geometry::Domain& domain, const std::vector<raytracer::BrokenRay>& rays,
                     const std::string& config_hash) {
  const View v = view_of(domain.outer());
  std::ostringstream os;
  os << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\">\n", kSize);
  os << "<!-- config_hash=" << config_hash << " -->\n";
  polyline(os, v, closed(domain.outer()), "stroke=\"black\" stroke-width=\"1.5\"");
  if (domain.obstacle()) polyline(os, v, closed(*domain.obstacle()), "stroke=\"firebrick\" stroke-width=\"1.5\"");
  for (const auto& ray : rays) {
    std::vector<geometry::Vec2> pts;
    for (const auto& seg : ray.segments)
      for (const auto& s : seg.samples) pts.push_back(s.x);
    polyline(os, v, pts, "stroke=\"steelblue\" stroke-width=\"0.6\" stroke-opacity=\"0.7\"");
  }
  os << "</svg>\n";
  return os.str();
}

std::string field_svg(const recon::FieldGrid& f, int component, const std::string& config_hash) {
  const auto& g = f.grid;
  const double R = g.r_max * 1.05;
  const View v{g.center.x() - R, g.center.y() - R, kSize / (2 * R)};
  double lo = 0.0, hi = 0.0;
  for (int n = 0; n < g.size(); ++n) {
    lo = std::min(lo, f.values[component * g.size() + n]);
    hi = std::max(hi, f.values[component * g.size() + n]);
  }
  const double span = std::max(std::abs(lo), std::abs(hi));
  std::ostringstream os;
  os << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\">\n", kSize);
  os << "<!-- config_hash=" << config_hash << " component=" << component << " -->\n";
  for (int i = 0; i + 1 < g.n_r; ++i)
    for (int j = 0; j < g.n_ang; ++j) {
      const int jn = (j + 1) % g.n_ang;
      const double val = 0.25 * (f.at(component, i, j) + f.at(component, i + 1, j) + f.at(component, i, jn) +
                                 f.at(component, i + 1, jn));
      const double t = span > 0.0 ? val / span : 0.0;
      const int red = static_cast<int>(std::lround(255 * std::clamp(1.0 + std::min(t, 0.0), 0.0, 1.0)));
      const int blue = static_cast<int>(std::lround(255 * std::clamp(1.0 - std::max(t, 0.0), 0.0, 1.0)));
      const int green = std::min(red, blue);
      const auto a = g.position(i, j), b = g.position(i + 1, j), c = g.position(i + 1, jn), d = g.position(i, jn);
      os << fmt::format(
          "<polygon fill=\"#{:02x}{:02x}{:02x}\" points=\"{:.3f},{:.3f} {:.3f},{:.3f} {:.3f},{:.3f} {:.3f},{:.3f}\"/>\n",
          red, green, blue, v.px(a.x()), v.py(a.y()), v.px(b.x()), v.py(b.y()), v.px(c.x()), v.py(c.y()), v.px(d.x()),
          v.py(d.y()));
    }
  os << "</svg>\n";
  return os.str();
}

}  // namespace brt::cli
