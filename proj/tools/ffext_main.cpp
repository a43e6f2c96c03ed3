#include "ffext/experiments.hpp"

int main(int argc, char** argv) { return ffext::cli_main(argc, argv); }
