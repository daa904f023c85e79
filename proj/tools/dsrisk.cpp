#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "dsrisk/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    dsrisk::cli::Environment env;
    if (const char* tau0 = std::getenv(dsrisk::cli::kTau0Key)) {
        env.emplace(dsrisk::cli::kTau0Key, tau0);
    }
    return dsrisk::cli::run(args, env, std::cout, std::cerr);
}
