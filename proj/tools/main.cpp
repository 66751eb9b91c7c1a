#include "qmwrt_cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qmwrt::cli::main_entry(args, std::cout, std::cerr);
}
