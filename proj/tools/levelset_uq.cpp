#include "levelset/cli.hpp"

int main(int argc, char** argv) { return lsq::cli::run(argc, argv); }
