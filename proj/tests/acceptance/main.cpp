// Acceptance harness: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "harness.hpp"

using namespace humo::acceptance;

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::string report_path;
  app.add_option("--only", only, "Criterion ids to run (default: all)")->delimiter(',');
  app.add_option("--report", report_path, "Also write the result lines to this file");
  CLI11_PARSE(app, argc, argv);

  std::vector<Criterion> all;
  for (auto group : {core_criteria, model_criteria, sweep_criteria, cli_criteria})
    for (Criterion& c : group()) all.push_back(std::move(c));
  std::sort(all.begin(), all.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  const std::set<int> selected(only.begin(), only.end());

  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    if (report) report << line << std::endl;
  };

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Stopwatch sw;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    char head[96];
    std::snprintf(head, sizeof(head), "CRITERION %2d %-5s %s (%.1fs)", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(),
                  sw.seconds());
    emit(head + (o.detail.empty() ? std::string() : " :: " + o.detail));
  }
  emit("SUMMARY " + std::to_string(failures) + " failing");
  return 0;
}
