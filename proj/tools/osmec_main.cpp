#include "osmec/cli.hpp"

int main(int argc, char** argv) { return osmec::cli::run(argc, argv); }
