#include "safe_field/cli.hpp"

int main(int argc, char** argv) { return safe_field::cli::run_command(argc, argv); }
