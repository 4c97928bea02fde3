#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pflab/report.hpp"

namespace {

std::string utc_stamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const pflab::Json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + out_path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-energy expansion and enhanced-binding toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool stamp = false;
  bool negative_control = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_path, "report file (default stdout)");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker thread count");
    sub->add_flag("--stamp", stamp, "add a wall-clock timestamp");
  };

  CLI::App* c_coeffs = app.add_subcommand(
      "coeffs", "expansion coefficients by closed form, quadrature, sampling");
  add_common(c_coeffs);
  CLI::App* c_sweep = app.add_subcommand(
      "fock-sweep", "ground states and trial energies over a coupling list");
  add_common(c_sweep);
  CLI::App* c_binding = app.add_subcommand(
      "binding", "resonance shooting and localization margin scan");
  add_common(c_binding);
  CLI::App* c_verify = app.add_subcommand(
      "verify", "cross-route and operator identity check battery");
  add_common(c_verify);
  c_verify->add_flag("--negative-control", negative_control,
                     "skew the angular grid so the cancellation check fails");

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    pflab::Json config = pflab::Json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return 1;
      }
      config = pflab::Json::parse(f);
      if (!config.is_object()) {
        std::cerr << "error: config root must be a JSON object\n";
        return 1;
      }
    }
    if (sub->count("--seed") > 0)
      config["seed"] = seed;

    int want_threads = threads;
    if (want_threads <= 0) {
      if (const char* env = std::getenv("PFLAB_THREADS"))
        want_threads = std::atoi(env);
    }
#ifdef _OPENMP
    if (want_threads > 0) omp_set_num_threads(want_threads);
#else
    (void)want_threads;
#endif

    pflab::CommandResult result;
    if (sub == c_coeffs) {
      result = pflab::cmd_coeffs(config);
    } else if (sub == c_sweep) {
      result = pflab::cmd_fock_sweep(config);
    } else if (sub == c_binding) {
      result = pflab::cmd_binding(config);
    } else {
      result = pflab::cmd_verify(config, negative_control);
    }
    if (stamp) result.report["timestamp"] = utc_stamp();
    emit(result.report, out_path);
    return result.exit_code;
  } catch (const pflab::Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
