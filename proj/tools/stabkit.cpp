// stabkit command-line front end.
//
// Exit codes: 0 = all assertions passed / no violation found,
//             1 = assertion failure or certificate violation,
//             2 = usage or configuration error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stabkit/stabkit.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

stabkit::Config overrides_from(const std::vector<std::string>& sets) {
  stabkit::Config c;
  for (const auto& s : sets) c.apply_override(s);
  return c;
}

int cmd_run(const std::string& id, const std::vector<std::string>& sets, std::string out) {
  if (out.empty()) out = "stabkit-out/" + id;
  const auto result = stabkit::run_scenario(id, overrides_from(sets), out);
  for (const auto& a : result.assertions)
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
  std::cout << id << ": " << (result.passed() ? "passed" : "FAILED") << " (artifacts in " << out << ")\n";
  return result.passed() ? exit_ok : exit_failed;
}

int cmd_certify(const std::string& source, const std::vector<std::string>& sets, const std::string& report) {
  stabkit::Config cfg = stabkit::load_certificate_config(source);
  for (const auto& s : sets) cfg.apply_override(s);
  const auto rep = stabkit::certificate_from_config(cfg).run();
  const std::string json = stabkit::io::report_json(rep).dump(2) + "\n";
  if (report.empty()) {
    std::cout << json;
  } else {
    stabkit::io::write_text(report, json);
    std::cout << rep.certificate << ": " << rep.verdict() << " (worst margin "
              << stabkit::io::format_double(rep.worst_margin) << ", " << rep.witnesses.size() << " witnesses)\n";
  }
  return rep.violated() ? exit_failed : exit_ok;
}

int cmd_plot(const std::string& csv, const std::string& style, std::string out) {
  if (out.empty()) {
    out = csv;
    const auto dot = out.rfind('.');
    const auto slash = out.find_last_of("/\\");
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) out.erase(dot);
    out += ".svg";
  }
  const auto table = stabkit::io::parse_csv(stabkit::io::read_text(csv));
  const auto st = style.empty() ? stabkit::plot::default_style(table) : stabkit::plot::parse_style(style);
  stabkit::io::write_text(out, stabkit::plot::render_svg(table, st));
  std::cout << "wrote " << out << '\n';
  return exit_ok;
}

void cmd_list_scenarios() {
  for (const auto& s : stabkit::scenario_catalogue()) {
    std::cout << s.id << "\n    " << s.description << "\n    defaults:";
    for (const auto& [k, v] : s.defaults()) std::cout << ' ' << k << '=' << v;
    std::cout << '\n';
  }
}

void cmd_list_systems() {
  for (const auto& e : stabkit::system_registry()) {
    std::cout << e.id << "  " << e.description;
    if (!e.defaults.values().empty()) {
      std::cout << "  [";
      bool first = true;
      for (const auto& [k, v] : e.defaults.values()) {
        std::cout << (first ? "" : ", ") << k << '=' << stabkit::io::format_double(v);
        first = false;
      }
      std::cout << ']';
    }
    std::cout << '\n';
  }
  std::cout << "\nbuilt-in certificates:\n";
  for (const auto& b : stabkit::builtin_certificates()) std::cout << b.name << "  " << b.description << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabkit: simulate systems, falsify stability certificates, estimate output-stability notions"};
  app.require_subcommand(1);

  std::string scenario, out, cert_source, report, csv, style, plot_out;
  std::vector<std::string> run_sets, cert_sets;

  auto* run = app.add_subcommand("run", "run a named scenario");
  run->add_option("scenario", scenario, "scenario id (see list-scenarios)")->required();
  run->add_option("--set", run_sets, "override a scenario parameter, key=value")->take_all();
  run->add_option("--out", out, "output directory (default stabkit-out/<scenario>)");

  auto* certify = app.add_subcommand("certify", "falsification-check a certificate");
  certify->add_option("config", cert_source, "config file or built-in certificate name")->required();
  certify->add_option("--set", cert_sets, "override a config key, key=value")->take_all();
  certify->add_option("--report", report, "write the JSON report here instead of stdout");

  auto* plot = app.add_subcommand("plot", "render a trajectory or estimate CSV as SVG");
  plot->add_option("csv", csv, "input CSV")->required();
  plot->add_option("--style", style, "states, all or curve (default by CSV kind)");
  plot->add_option("--out", plot_out, "output SVG path (default: CSV path with .svg)");

  auto* list_scenarios = app.add_subcommand("list-scenarios", "list built-in scenarios");
  auto* list_systems = app.add_subcommand("list-systems", "list registered systems and built-in certificates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*run) return cmd_run(scenario, run_sets, out);
    if (*certify) return cmd_certify(cert_source, cert_sets, report);
    if (*plot) return cmd_plot(csv, style, plot_out);
    if (*list_scenarios) cmd_list_scenarios();
    if (*list_systems) cmd_list_systems();
    return exit_ok;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failed;
  }
}
