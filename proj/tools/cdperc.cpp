// Command-line front end: one subcommand per action, options generated from
// the action table, results printed and written as JSON artifacts.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "cdp/experiment.hpp"

namespace {

std::string flag_name(const std::string& key) {
  std::string out = key;
  for (auto& c : out)
    if (c == '_') c = '-';
  return "--" + out;
}

struct Bound {
  const cdp::ActionSpec* spec;
  CLI::App* app;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained-degree percolation: bounds, simulations and explorations"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 1;
  std::string out_dir, config_path;
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--out-dir", out_dir, "directory for artifacts (default $CDP_OUTPUT_DIR)");
  app.add_option("--config", config_path, "key=value file; flags override it");

  std::vector<std::unique_ptr<Bound>> bound;
  std::map<std::string, CLI::App*> commands;
  for (const auto& spec : cdp::action_specs()) {
    CLI::App* parent = nullptr;
    if (spec.action.empty()) {
      parent = app.add_subcommand(spec.command, spec.help);
      parent->fallthrough();
    } else {
      auto it = commands.find(spec.command);
      if (it == commands.end()) {
        it = commands.emplace(spec.command, app.add_subcommand(spec.command, spec.command + " actions")).first;
        it->second->require_subcommand(1);
        it->second->fallthrough();
      }
      parent = it->second->add_subcommand(spec.action, spec.help);
      parent->fallthrough();
    }
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->app = parent;
    for (const auto& o : spec.options) {
      if (o.flag) {
        parent->add_flag(flag_name(o.name), b->flags[o.name], o.help);
      } else {
        std::string help = o.help;
        if (!o.default_value.empty()) help += " [" + o.default_value + "]";
        parent->add_option(flag_name(o.name), b->values[o.name], help);
      }
    }
    bound.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Bound* chosen = nullptr;
  for (const auto& b : bound)
    if (b->app->parsed()) chosen = b.get();
  if (chosen == nullptr) {
    std::cerr << "no action given\n";
    return 2;
  }

  try {
    cdp::Request request;
    request.command = chosen->spec->command;
    request.action = chosen->spec->action;
    request.threads = threads;
    if (!config_path.empty()) request.config = cdp::read_config_file(config_path);
    for (const auto& o : chosen->spec->options) {
      CLI::Option* opt = chosen->app->get_option(flag_name(o.name));
      if (opt->count() == 0) continue;
      request.config[o.name] = o.flag ? (chosen->flags.at(o.name) ? "true" : "false") : chosen->values.at(o.name);
    }
    const cdp::Response response = cdp::execute(request);
    if (response.text.empty()) std::cout << response.record.dump(2) << "\n";
    else std::cout << response.text;

    if (out_dir.empty())
      if (const char* env = std::getenv("CDP_OUTPUT_DIR")) out_dir = env;
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::string stem = request.command + (request.action.empty() ? "" : "-" + request.action);
      write_file(std::filesystem::path(out_dir) / (stem + ".json"), response.record.dump(2) + "\n");
      for (const auto& a : response.artifacts) write_file(std::filesystem::path(out_dir) / a.filename, a.content);
    }
    return response.exit_code;
  } catch (const cdp::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
