#include "brt/cli.hpp"

int main(int argc, char** argv) { return brt::cli::run(argc, argv); }
