// Command-line front end. Everything domain-specific happens behind the C
// API in libdoshap; this binary only parses flags, moves bytes, and maps
// status codes onto exit codes.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "doshap.h"

namespace {

using nlohmann::json;

struct Options {
  std::string graph_path;
  std::string game_path;
  std::string scheme = "shapley";
  std::string base = "regression";
  std::string out_path;
  std::string format = "json";
  std::int64_t budget = 0;
  int multiplier = 8;
  int order = 1;
  std::uint64_t seed = 0;
  bool require_identifiable = false;
  bool plot_data = false;
  std::vector<double> ratios{0.25, 0.5, 0.75, 1.0};
  int repeats = 50;
};

int worker_cap() {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (const char* env = std::getenv("DOSHAP_THREADS"); env != nullptr) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < workers) workers = cap;
    if (cap >= 1 && workers < 1) workers = cap;
  }
  return workers;
}

[[noreturn]] void emit_error_and_exit(int code, const std::string& kind, const std::string& message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  std::cout << j.dump() << "\n";
  std::exit(code);
}

[[noreturn]] void fail_status(doshap_status status) {
  const char* kind = "internal";
  switch (status) {
    case DOSHAP_ERROR_PARSE: kind = "parse"; break;
    case DOSHAP_ERROR_VALIDATION: kind = "validation"; break;
    case DOSHAP_ERROR_NOT_IDENTIFIABLE: kind = "not_identifiable"; break;
    case DOSHAP_ERROR_ORACLE: kind = "oracle"; break;
    case DOSHAP_ERROR_INVALID_ARGUMENT: kind = "invalid_argument"; break;
    default: break;
  }
  emit_error_and_exit(static_cast<int>(status), kind, doshap_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    emit_error_and_exit(DOSHAP_ERROR_PARSE, "parse", "cannot open file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string csv_escape(std::string value) {
  for (char& c : value) {
    if (c == ',') c = '|';
  }
  return value;
}

std::string scalar_csv(const json& j) {
  if (j.is_string()) return csv_escape(j.get<std::string>());
  return j.dump();
}

std::string join_names(const json& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += "|";
    out += n.get<std::string>();
  }
  return out;
}

// Flat projection of the JSON report for spreadsheet use.
std::string to_csv(const std::string& subcommand, const json& report) {
  std::ostringstream out;
  if (subcommand == "classes") {
    out << "basis,closure,simple\n";
    for (const auto& cls : report.at("classes")) {
      out << join_names(cls.at("basis")) << "," << join_names(cls.at("closure")) << ","
          << (cls.at("simple").get<bool>() ? "true" : "false") << "\n";
    }
  } else if (subcommand == "identify") {
    out << "key,value\n";
    out << "identifiable," << (report.at("identifiable").get<bool>() ? "true" : "false") << "\n";
    for (const auto& name : report.at("failing_singletons")) {
      out << "failing_singleton," << name.get<std::string>() << "\n";
    }
  } else if (subcommand == "exact" || subcommand == "estimate") {
    out << "player,value\n";
    for (const auto& [name, value] : report.at("values").items()) {
      out << csv_escape(name) << "," << scalar_csv(value) << "\n";
    }
  } else if (subcommand == "interactions") {
    out << "players,value\n";
    for (const auto& [label, value] : report.at("values").items()) {
      out << csv_escape(label) << "," << scalar_csv(value) << "\n";
    }
  } else {  // report
    out << "ratio,budget,median_relative_mse,mean_relative_mse\n";
    for (const auto& row : report.at("rows")) {
      out << scalar_csv(row.at("ratio")) << "," << scalar_csv(row.at("budget")) << ","
          << scalar_csv(row.at("median_relative_mse")) << ","
          << scalar_csv(row.at("mean_relative_mse")) << "\n";
    }
  }
  return out.str();
}

void write_output(const Options& opt, const std::string& subcommand, const std::string& report_json) {
  std::string payload = report_json + "\n";
  if (opt.format == "csv") {
    payload = to_csv(subcommand, json::parse(report_json));
  }
  if (opt.out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) {
    emit_error_and_exit(DOSHAP_ERROR_VALIDATION, "validation",
                        "cannot write to '" + opt.out_path + "'");
  }
  out << payload;
}

struct GraphHandle {
  doshap_graph* ptr = nullptr;
  ~GraphHandle() { doshap_graph_free(ptr); }
};

struct GameHandle {
  doshap_game* ptr = nullptr;
  ~GameHandle() { doshap_game_free(ptr); }
};

struct ReportHandle {
  char* text = nullptr;
  ~ReportHandle() { doshap_string_free(text); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and budgeted do-Shapley attribution over causal graphs"};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* cmd, bool needs_game) {
    cmd->add_option("--graph", opt.graph_path, "Graph JSON file")->required();
    cmd->add_option("--out", opt.out_path, "Write the report here instead of stdout");
    cmd->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opt.seed, "Seed for every random draw in the run");
    if (needs_game) {
      cmd->add_option("--game", opt.game_path, "Game JSON file")->required();
      cmd->add_option("--scheme", opt.scheme, "shapley, banzhaf, or beta:alpha,beta");
    }
  };

  CLI::App* classes = app.add_subcommand("classes", "Enumerate the intervention lattice");
  add_common(classes, false);

  CLI::App* identify = app.add_subcommand("identify", "Decide do-Shapley identifiability");
  add_common(identify, false);

  CLI::App* exact = app.add_subcommand("exact", "Exact attribution via the class inventory");
  add_common(exact, true);
  exact->add_flag("--require-identifiable", opt.require_identifiable,
                  "Refuse to run when some singleton intervention is not identifiable");

  CLI::App* estimate = app.add_subcommand("estimate", "Budgeted attribution estimate");
  add_common(estimate, true);
  estimate->add_option("--budget", opt.budget, "Oracle query budget m")->required();
  estimate->add_option("--base", opt.base, "regression or mc-msr")
      ->check(CLI::IsMember({"regression", "mc-msr"}));
  estimate->add_option("--multiplier", opt.multiplier, "Simulated rows per budget unit");
  estimate->add_flag("--require-identifiable", opt.require_identifiable,
                     "Check identifiability before any oracle query");
  estimate->get_option("--seed")->required();

  CLI::App* interactions = app.add_subcommand("interactions", "n-Shapley interaction values");
  add_common(interactions, true);
  interactions->add_option("--order", opt.order, "Interaction order n")->required();
  interactions->add_flag("--require-identifiable", opt.require_identifiable,
                         "Check identifiability before any oracle query");

  CLI::App* report = app.add_subcommand("report", "Estimator-quality projections");
  add_common(report, true);
  report->add_flag("--plot-data", opt.plot_data, "Emit (budget ratio, relative MSE) rows")
      ->required();
  report->add_option("--ratios", opt.ratios, "Budget ratios m/r to evaluate");
  report->add_option("--repeats", opt.repeats, "Seeded runs per ratio");
  report->add_option("--base", opt.base, "regression or mc-msr")
      ->check(CLI::IsMember({"regression", "mc-msr"}));
  report->add_option("--multiplier", opt.multiplier, "Simulated rows per budget unit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error_and_exit(DOSHAP_ERROR_PARSE, "parse", e.what());
  }

  GraphHandle graph;
  if (const auto st = doshap_graph_parse(read_file(opt.graph_path).c_str(), &graph.ptr);
      st != DOSHAP_OK) {
    fail_status(st);
  }

  GameHandle game;
  const bool needs_game = !opt.game_path.empty();
  if (needs_game) {
    if (const auto st = doshap_game_parse(graph.ptr, read_file(opt.game_path).c_str(), &game.ptr);
        st != DOSHAP_OK) {
      fail_status(st);
    }
  }

  ReportHandle out;
  doshap_status st = DOSHAP_OK;
  std::string subcommand;
  if (classes->parsed()) {
    subcommand = "classes";
    st = doshap_run_classes(graph.ptr, opt.seed, &out.text);
  } else if (identify->parsed()) {
    subcommand = "identify";
    st = doshap_run_identify(graph.ptr, opt.seed, &out.text);
  } else if (exact->parsed()) {
    subcommand = "exact";
    st = doshap_run_exact(graph.ptr, game.ptr, opt.scheme.c_str(), opt.seed,
                          opt.require_identifiable ? 1 : 0, &out.text);
  } else if (estimate->parsed()) {
    subcommand = "estimate";
    st = doshap_run_estimate(graph.ptr, game.ptr, opt.scheme.c_str(), opt.budget,
                             opt.base.c_str(), opt.multiplier, opt.seed,
                             opt.require_identifiable ? 1 : 0, &out.text);
  } else if (interactions->parsed()) {
    subcommand = "interactions";
    st = doshap_run_interactions(graph.ptr, game.ptr, opt.scheme.c_str(), opt.order, opt.seed,
                                 opt.require_identifiable ? 1 : 0, &out.text);
  } else if (report->parsed()) {
    subcommand = "report";
    st = doshap_run_plot_data(graph.ptr, game.ptr, opt.scheme.c_str(), opt.base.c_str(),
                              opt.multiplier, opt.ratios.data(),
                              static_cast<int>(opt.ratios.size()), opt.repeats, opt.seed,
                              worker_cap(), &out.text);
  }
  if (st != DOSHAP_OK) fail_status(st);

  write_output(opt, subcommand, out.text);
  return 0;
}
