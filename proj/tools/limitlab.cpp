#include "limitlab/cli.hpp"

int main(int argc, char** argv) { return limitlab::cli::run(argc, argv); }
