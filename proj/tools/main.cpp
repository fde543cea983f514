#include "tgq/cli.hpp"

int main(int argc, char** argv) { return tgq::cli::run(argc, argv); }
