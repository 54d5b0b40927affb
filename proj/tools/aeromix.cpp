#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include "aeromix/date.hpp"
#include "aeromix/error.hpp"
#include "aeromix/parallel.hpp"
#include "aeromix/pipeline.hpp"
#include "aeromix/strings.hpp"
#include "aeromix/version.hpp"

namespace {

int exit_code_for(aeromix::ErrorClass klass) {
  using aeromix::ErrorClass;
  switch (klass) {
    case ErrorClass::ConfigInvalid:
    case ErrorClass::InputMissing:
    case ErrorClass::InputInvalid:
    case ErrorClass::ParseError:
    case ErrorClass::ValidationError:
      return 2;
    default:
      return 1;
  }
}

bool verbose_logging() {
  const char* env = std::getenv("AEROMIX_LOG");
  if (env == nullptr) return false;
  const std::string v(env);
  return !(v.empty() || v == "0" || v == "off" || v == "quiet");
}

std::vector<int> parse_scenarios(const std::string& arg) {
  std::vector<int> ids;
  for (const auto& token : aeromix::split(arg, ',')) {
    const std::string t = aeromix::trim(token);
    if (t.empty()) continue;
    ids.push_back(static_cast<int>(aeromix::parse_long(t, "--scenarios")));
  }
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aeromix: multi-sensor AOD fusion for PM2.5 estimation"};
  app.set_version_flag("--version", std::string("aeromix ") + aeromix::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string scenarios_arg;
  std::string date_arg;
  std::string scene_config_path;
  long long seed_override = -1;
  int threads = 0;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("--config", config_path, "pipeline config file")->required();
    }
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--threads", threads,
                    "worker threads (0 = hardware); never changes results");
  };

  CLI::App* c_prep = app.add_subcommand("preprocess", "build per-product training matrices");
  add_common(c_prep, true);
  CLI::App* c_data = app.add_subcommand("fuse-data", "quality-weighted data-level fusion");
  add_common(c_data, true);
  CLI::App* c_dec = app.add_subcommand("fuse-decision", "decision-level fusion scenarios");
  add_common(c_dec, true);
  c_dec->add_option("--scenarios", scenarios_arg, "comma list of scenario ids (default: config)");
  CLI::App* c_map = app.add_subcommand("map", "daily PM2.5 surface by IDW");
  add_common(c_map, true);
  c_map->add_option("--date", date_arg, "map date, YYYY-MM-DD")->required();
  CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic scene");
  c_synth->add_option("--config", scene_config_path, "scene config file")->required();
  c_synth->add_option("--out", out_dir, "output directory");
  c_synth->add_option("--threads", threads, "worker threads; never changes results");
  CLI::App* c_eval = app.add_subcommand("eval", "compare model kinds per product");
  add_common(c_eval, true);

  CLI11_PARSE(app, argc, argv);

  try {
    aeromix::set_max_threads(threads);
    if (verbose_logging()) {
      std::fprintf(stderr, "aeromix %s: starting\n", aeromix::kVersion);
    }

    if (c_synth->parsed()) {
      aeromix::cmd_synth(scene_config_path, out_dir);
      return 0;
    }

    aeromix::PipelineConfig config = aeromix::PipelineConfig::load(config_path);
    if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);

    if (c_prep->parsed()) {
      aeromix::cmd_preprocess(config, config_path, out_dir);
    } else if (c_data->parsed()) {
      aeromix::cmd_fuse_data(config, config_path, out_dir);
    } else if (c_dec->parsed()) {
      aeromix::cmd_fuse_decision(config, config_path, parse_scenarios(scenarios_arg),
                                 out_dir);
    } else if (c_map->parsed()) {
      aeromix::cmd_map(config, config_path, aeromix::Date::parse(date_arg), out_dir);
    } else if (c_eval->parsed()) {
      aeromix::cmd_eval(config, config_path, out_dir);
    }
    if (verbose_logging()) {
      std::fprintf(stderr, "aeromix %s: done\n", aeromix::kVersion);
    }
    return 0;
  } catch (const aeromix::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", aeromix::to_string(e.klass()), e.what());
    return exit_code_for(e.klass());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal-error: %s\n", e.what());
    return 1;
  }
}
