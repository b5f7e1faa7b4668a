#include "whitney/cli.hpp"

int main(int argc, char** argv) { return whitney::cli::run(argc, argv); }
