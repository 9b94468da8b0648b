#include "spade/cli.hpp"

int main(int argc, char** argv) { return spade::cli::main_entry(argc, argv); }
