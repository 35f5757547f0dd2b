#pragma once

#include <array>
#include <set>
#include <string>

#include <json.hpp>

namespace brt::json_util {

// All helpers throw ConfigError naming `where`.
void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where);
double number(const nlohmann::json& j, const char* key, const std::string& where);
double number_or(const nlohmann::json& j, const char* key, double fallback, const std::string& where);
int integer(const nlohmann::json& j, const char* key, const std::string& where);
int integer_or(const nlohmann::json& j, const char* key, int fallback, const std::string& where);
std::array<double, 2> pair(const nlohmann::json& j, const char* key, const std::string& where);

}  // namespace brt::json_util
