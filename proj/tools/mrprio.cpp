#include "mrprio/cli.hpp"

int main(int argc, char** argv) { return mrprio::cli::run(argc, argv); }
