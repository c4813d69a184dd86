// oscil: locate conjugate and focal points, eigenvalues and functional
// verdicts for (r y'')'' - (q y')' = lambda p y, and write a JSON report.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oscil/report.hpp"

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw oscil::Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw oscil::Error("failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillation and eigenvalue analysis of fourth-order self-adjoint equations"};
  std::string command, config_path, json_path, csv_path;
  std::optional<std::string> r, p, q;
  std::optional<double> a, x_max, tol;
  app.add_option("command", command, "Analysis to run")
      ->required()
      ->check(CLI::IsMember({"points", "eigen", "scan", "verify", "report"}));
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--r", r, "Coefficient r(x) > 0");
  app.add_option("--p", p, "Weight p(x) > 0");
  app.add_option("--q", q, "Coefficient q(x)");
  app.add_option("--a", a, "Left endpoint");
  app.add_option("--xmax", x_max, "Right end of the scan window");
  app.add_option("--json", json_path, "Report path (default: standard output)");
  app.add_option("--csv", csv_path, "Subwronskian trace path");
  app.add_option("--tol", tol, "Relative integration tolerance; the absolute one is 1e-2 of it")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  oscil::report::RunConfig cfg;
  try {
    nlohmann::json j = config_path.empty() ? nlohmann::json::object() : oscil::report::read_config_json(config_path);
    if (!j.is_object()) throw oscil::ConfigError("", "config must be a JSON object");
    if (r) j["r"] = *r;
    if (p) j["p"] = *p;
    if (q) j["q"] = *q;
    if (a) j["a"] = *a;
    if (x_max) j["x_max"] = *x_max;
    if (tol) {
      j["tolerances"]["rtol"] = *tol;
      j["tolerances"]["atol"] = 1e-2 * *tol;
    }
    j["analyses"] = nlohmann::json::array({command});
    if (!json_path.empty()) j["outputs"]["json"] = json_path;
    if (!csv_path.empty()) j["outputs"]["csv"] = csv_path;
    cfg = oscil::report::config_from_json(j);
  } catch (const oscil::Error& e) {
    std::cerr << "oscil: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto out = oscil::report::run_report(cfg);
    const std::string text = oscil::report::serialize(out.document);
    if (cfg.outputs.json.empty())
      std::cout << text;
    else
      write_file(cfg.outputs.json, text);
    if (!cfg.outputs.csv.empty()) write_file(cfg.outputs.csv, out.trace_csv);
    if (!cfg.outputs.transform_csv.empty() && !out.transform_csv.empty())
      write_file(cfg.outputs.transform_csv, out.transform_csv);
    if (!cfg.outputs.scan_csv.empty() && !out.scan_csv.empty()) write_file(cfg.outputs.scan_csv, out.scan_csv);
  } catch (const std::exception& e) {
    std::cerr << "oscil: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
