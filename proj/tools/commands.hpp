#pragma once

#include <filesystem>

#include "config.hpp"

namespace kplane::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kIoError = 3, kNumericError = 4 };

struct Context {
  RunConfig config;
  std::filesystem::path out;
};

int cmd_phantom(const Context& ctx);
int cmd_forward(const Context& ctx);
int cmd_fbp(const Context& ctx);
int cmd_reconstruct(const Context& ctx);
int cmd_calibrate(const Context& ctx);
int cmd_verify(const Context& ctx);

}  // namespace kplane::cli
