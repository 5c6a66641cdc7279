#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kplane/errors.hpp"
#include "kplane/parallel.hpp"

using namespace kplane;
using namespace kplane::cli;

namespace {

int threads_from_env() {
  const char* env = std::getenv("KPLANE_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("KPLANE_THREADS must be a positive integer");
  return static_cast<int>(n);
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        std::optional<std::uint64_t> seed, std::optional<int> threads) {
  Context ctx{load_config(config_path), out_dir};
  if (seed) {
    ctx.config.seed = *seed;
    ctx.config.sparse.seed = *seed;
  }
  set_thread_count(threads ? *threads : threads_from_env());
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) throw IoError("cannot create output directory " + ctx.out.string());

  static const std::map<std::string, int (*)(const Context&)> table{
      {"phantom", cmd_phantom},         {"forward", cmd_forward},     {"fbp", cmd_fbp},
      {"reconstruct", cmd_reconstruct}, {"calibrate", cmd_calibrate}, {"verify", cmd_verify}};
  return table.at(command)(ctx);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-plane transform toolkit"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  const std::pair<const char*, const char*> commands[] = {
      {"phantom", "Render the configured phantom to a KPT file"},
      {"forward", "k-plane transform of the phantom"},
      {"fbp", "Filtered backprojection of the sinogram"},
      {"verify", "Run the property-check registry"},
      {"reconstruct", "Sparse ridge-atom reconstruction from linear measurements"},
      {"calibrate", "End-to-end gain of forward + fbp on the unit Gaussian"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override every configured seed");
    sub->add_option("--threads", threads, "Worker threads (fallback: KPLANE_THREADS)")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), config_path, out_dir, seed, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kIoError;
  } catch (const DomainError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  }
}
