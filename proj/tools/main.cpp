#include "cli.hpp"

int main(int argc, char** argv) { return pharmonic::cli::run(argc, argv); }
