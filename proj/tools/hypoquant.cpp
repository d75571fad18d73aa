#include "hypoquant/cli.hpp"

int main(int argc, char** argv) { return hypoquant::cli::run(argc, argv); }
