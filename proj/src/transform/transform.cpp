#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "brt/errors.hpp"
#include "brt/parallel.hpp"
#include "brt/transform.hpp"

namespace brt::transform {

double integrate_along(const BrokenRay& ray, const SymTensorField& f) {
  double total = 0.0;
  for (const auto& seg : ray.segments) {
    const auto& s = seg.samples;
    if (s.size() < 3) continue;
    auto val = [&](std::size_t i) { return tensorfield::eval_on_sm(f, {s[i].x, s[i].theta}); };
    double prev = val(0);
    for (std::size_t i = 0; i + 2 < s.size(); i += 2) {
      const double mid = val(i + 1), end = val(i + 2);
      total += (s[i + 2].t - s[i].t) / 6.0 * (prev + 4.0 * mid + end);
      prev = end;
    }
  }
  return total;
}

double u_at(const Domain& domain, const SymTensorField& f, const PhasePoint& p, const TraceParams& params,
            BrokenRay* ray_out) {
  PhasePoint start = p;
  if (const auto* obs = domain.obstacle(); obs && std::abs(obs->level(p.x)) <= geometry::kBoundaryTolerance) {
    const auto bp = geometry::boundary_data(domain, f.metric(), p.x);
    if (geometry::normal_cosine(bp, p.theta) > 0.0) start.theta = geometry::reflect_angle(bp, p.theta);
  }
  BrokenRay ray = raytracer::trace_broken_ray(domain, f.metric(), start, params);
  const double v = integrate_along(ray, f);
  if (ray_out) *ray_out = std::move(ray);
  return v;
}

TransformDataset forward(const Domain& domain, const ConformalMetric& metric, const RayFan& fan,
                         const SymTensorField& f, const TraceParams& params) {
  if (fan.states.empty()) throw std::invalid_argument("fan is empty");
  TransformDataset ds;
  ds.step = params.step;
  ds.rows.resize(fan.states.size());
  parallel_for(fan.states.size(), [&](std::size_t i) {
    DatasetRow& row = ds.rows[i];
    row.ray_id = static_cast<int>(i);
    row.start = fan.states[i];
    try {
      const auto ray = raytracer::trace_broken_ray(domain, metric, fan.states[i], params);
      row.n_reflections = static_cast<int>(ray.reflections.size());
      row.tau = ray.tau;
      row.value = integrate_along(ray, f);
    } catch (const raytracer::TraceError& e) {
      row.status = raytracer::to_string(e.kind());
      row.tau = std::numeric_limits<double>::quiet_NaN();
      row.value = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return ds;
}

smcalculus::SMGridFunction integral_function_u(const SymTensorField& f, smcalculus::GridPtr grid,
                                               const TraceParams& params) {
  const auto& g = *grid;
  smcalculus::SMGridFunction u(grid);
  u.flags.assign(g.size(), 0);
  const auto& domain = g.domain();
  parallel_for(g.size(), [&](std::size_t n) {
    const int k = static_cast<int>(n % g.n_theta());
    const std::size_t b = n / g.n_theta();
    const int i = static_cast<int>(b / g.n_ang()), j = static_cast<int>(b % g.n_ang());
    if (!g.in_domain(b)) {
      u.valid[n] = 0;
      return;
    }
    try {
      BrokenRay ray;
      u.values[n] = u_at(domain, f, {g.position(i, j), g.theta(k)}, params, &ray);
      if (ray.near_tangential > 0) u.flags[n] |= smcalculus::SMGridFunction::kNearTangential;
      if (ray.grazing) u.flags[n] |= smcalculus::SMGridFunction::kGrazing;
    } catch (const std::exception&) {
      u.valid[n] = 0;
    }
  });
  return u;
}

void TransformDataset::write_csv(std::ostream& os) const {
  os << "# config_hash=" << config_hash << " step=" << std::setprecision(17) << step << " quadrature=" << quadrature
     << "\n";
  os << "ray_id,x0,y0,theta0,n_reflections,tau,value,status\n";
  for (const auto& r : rows)
    os << r.ray_id << ',' << r.start.x.x() << ',' << r.start.x.y() << ',' << r.start.theta << ','
       << r.n_reflections << ',' << r.tau << ',' << r.value << ',' << r.status << '\n';
}

TransformDataset TransformDataset::read_csv(std::istream& is) {
  TransformDataset ds;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "config_hash") ds.config_hash = val;
        if (key == "step") ds.step = std::stod(val);
        if (key == "quadrature") ds.quadrature = val;
      }
      continue;
    }
    if (!header) {
      if (line.rfind("ray_id,x0,y0,theta0,n_reflections,tau,value", 0) != 0)
        throw ConfigError("dataset: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::istringstream in(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (cells.size() < 7) throw ConfigError("dataset: line " + std::to_string(lineno) + " has too few columns");
    try {
      DatasetRow r;
      r.ray_id = std::stoi(cells[0]);
      r.start = {geometry::Vec2(std::stod(cells[1]), std::stod(cells[2])), std::stod(cells[3])};
      r.n_reflections = std::stoi(cells[4]);
      r.tau = std::stod(cells[5]);
      r.value = std::stod(cells[6]);
      r.status = cells.size() > 7 ? cells[7] : "ok";
      ds.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ConfigError("dataset: line " + std::to_string(lineno) + " is not numeric");
    }
  }
  if (!header) throw ConfigError("dataset: missing header");
  return ds;
}

}  // namespace brt::transform
