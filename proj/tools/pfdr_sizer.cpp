#include "pfdr/cli.hpp"

int main(int argc, char** argv) { return pfdr::cli::main_entry(argc, argv); }
