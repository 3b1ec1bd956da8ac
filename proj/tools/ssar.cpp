#include "ssar/cli/commands.hpp"

int main(int argc, char** argv) { return ssar::cli::run(argc, argv); }
