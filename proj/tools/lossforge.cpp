#include "lossforge/cli.hpp"

int main(int argc, char** argv) { return lossforge::cli::dispatch(argc, argv); }
