#include <exception>
#include <iostream>

#include "convo/cli.hpp"
#include "convo/common.hpp"

int main(int argc, char** argv) {
  bool help_requested = false;
  try {
    const convo::RunConfig cfg = convo::parse_cli(argc, argv, std::cout, help_requested);
    if (help_requested) return 0;
    return convo::run(cfg, std::cout, std::cerr);
  } catch (const convo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
