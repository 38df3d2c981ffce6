#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("tests");
  logger->set_level(spdlog::level::err);
  spdlog::set_default_logger(logger);
  doctest::Context context(argc, argv);
  return context.run();
}
