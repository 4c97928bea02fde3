#include "pflab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pflab {

Json tagged(double value, double error, const char* route) {
  Json j;
  j["value"] = value;
  j["error"] = error;
  j["route"] = route;
  return j;
}

void check_keys(const Json& config, const std::vector<std::string>& allowed) {
  if (!config.is_object())
    throw std::invalid_argument("config: expected a JSON object");
  for (const auto& item : config.items()) {
    bool ok = false;
    for (const auto& k : allowed)
      if (item.key() == k) ok = true;
    if (!ok)
      throw std::invalid_argument("config: unknown key \"" + item.key() +
                                  "\"");
  }
}

namespace {

const Json* find(const Json& c, const std::string& key) {
  const auto it = c.find(key);
  return it == c.end() ? nullptr : &*it;
}

}  // namespace

double cfg_num(const Json& c, const std::string& key, double def) {
  const Json* j = find(c, key);
  if (!j) return def;
  if (!j->is_number())
    throw std::invalid_argument("config: \"" + key + "\" must be a number");
  return j->get<double>();
}

int cfg_int(const Json& c, const std::string& key, int def) {
  const Json* j = find(c, key);
  if (!j) return def;
  if (!j->is_number_integer())
    throw std::invalid_argument("config: \"" + key + "\" must be an integer");
  return j->get<int>();
}

bool cfg_bool(const Json& c, const std::string& key, bool def) {
  const Json* j = find(c, key);
  if (!j) return def;
  if (!j->is_boolean())
    throw std::invalid_argument("config: \"" + key + "\" must be a boolean");
  return j->get<bool>();
}

std::string cfg_str(const Json& c, const std::string& key,
                    const std::string& def) {
  const Json* j = find(c, key);
  if (!j) return def;
  if (!j->is_string())
    throw std::invalid_argument("config: \"" + key + "\" must be a string");
  return j->get<std::string>();
}

std::vector<double> cfg_list(const Json& c, const std::string& key,
                             const std::vector<double>& def) {
  const Json* j = find(c, key);
  if (!j) return def;
  if (j->is_number()) return {j->get<double>()};
  if (!j->is_array())
    throw std::invalid_argument("config: \"" + key +
                                "\" must be a number or array");
  std::vector<double> out;
  for (const auto& v : *j) {
    if (!v.is_number())
      throw std::invalid_argument("config: \"" + key +
                                  "\" entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string csv_string(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot open " + path);
  f << csv_string(header, rows);
}

}  // namespace pflab
