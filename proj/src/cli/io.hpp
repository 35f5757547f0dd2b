#pragma once

#include <string>
#include <vector>

#include "brt/geometry.hpp"
#include "brt/raytracer.hpp"
#include "brt/recon.hpp"

namespace brt::cli {

std::string join_path(const std::string& dir, const std::string& name);
void ensure_dir(const std::string& dir);
std::string format_double(double v);

std::string rays_svg(const geometry::Domain& domain, const std::vector<raytracer::BrokenRay>& rays,
                     const std::string& config_hash);
std::string field_svg(const recon::FieldGrid& f, int component, const std::string& config_hash);

}  // namespace brt::cli
