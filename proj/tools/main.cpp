#include "cli.hpp"

int main(int argc, char** argv) { return swarmload::cli::run(argc, argv); }
