#include "sunset/cli.hpp"

#include <csignal>
#include <iostream>

namespace {

extern "C" void on_sigint(int) {
    sunset::cli::interrupt_flag().store(true);
    // a second Ctrl-C terminates immediately
    std::signal(SIGINT, SIG_DFL);
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_sigint);
    const std::vector<std::string> args(argv + 1, argv + argc);
    return sunset::cli::run(args, std::cout, std::cerr);
}
