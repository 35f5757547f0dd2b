#include "brt/json_util.hpp"

#include "brt/errors.hpp"

namespace brt::json_util {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double number(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const nlohmann::json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

int integer(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw ConfigError(where + ": '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

int integer_or(const nlohmann::json& j, const char* key, int fallback, const std::string& where) {
  return j.contains(key) ? integer(j, key, where) : fallback;
}

std::array<double, 2> pair(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2 || !j.at(key)[0].is_number() ||
      !j.at(key)[1].is_number())
    throw ConfigError(where + ": '" + key + "' must be a pair of numbers");
  return {j.at(key)[0].get<double>(), j.at(key)[1].get<double>()};
}

}  // namespace brt::json_util
