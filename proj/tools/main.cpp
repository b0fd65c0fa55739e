#include "symclust/cli.hpp"

int main(int argc, char** argv) { return symclust::run_cli(argc, argv); }
