#include "mixeig/cli.hpp"

int main(int argc, char** argv) { return mixeig::cli::main(argc, argv); }
