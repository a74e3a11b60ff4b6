#include "walkforge/cli.hpp"

int main(int argc, char** argv) { return walkforge::cli::dispatch(argc, argv); }
