#include "commands.hpp"

int main(int argc, char** argv) { return iwmc::cli::run_cli(argc, argv); }
