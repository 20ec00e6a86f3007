#include "rotjac/cli.hpp"

int main(int argc, char** argv) { return rotjac::run_cli(argc, argv); }
