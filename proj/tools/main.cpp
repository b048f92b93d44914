#include "sinkdiv/cli.hpp"

int main(int argc, char** argv) { return sinkdiv::run_cli(argc, argv); }
