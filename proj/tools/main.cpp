#include "signlab/cli.hpp"

int main(int argc, char** argv) { return signlab::cli::run(argc, argv); }
