#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace pflab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "pflab-report/1";

// numeric result with its error estimate and evaluation route tag
// (closed / quad / mc / discrete / fit)
Json tagged(double value, double error, const char* route);

// throws std::invalid_argument if config holds a key outside allowed
// (fail-closed) or a listed key has the wrong type category
void check_keys(const Json& config, const std::vector<std::string>& allowed);

double cfg_num(const Json& c, const std::string& key, double def);
int cfg_int(const Json& c, const std::string& key, int def);
bool cfg_bool(const Json& c, const std::string& key, bool def);
std::string cfg_str(const Json& c, const std::string& key,
                    const std::string& def);
std::vector<double> cfg_list(const Json& c, const std::string& key,
                             const std::vector<double>& def);

// comma separated, LF line endings, header row, values via "%.12g"
std::string csv_string(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CommandResult {
  Json report;
  int exit_code = 0;  // 0 ok, 1 validation/check failure, 2 non-convergence
};

CommandResult cmd_coeffs(const Json& config);
CommandResult cmd_fock_sweep(const Json& config);
CommandResult cmd_binding(const Json& config);
CommandResult cmd_verify(const Json& config, bool negative_control = false);

}  // namespace pflab
