#include "tev/cli.hpp"

int main(int argc, char** argv) { return tev::cli::run(argc, argv); }
