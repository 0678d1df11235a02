#include "netboot/cli.hpp"

int main(int argc, char** argv) { return netboot::cli_main(argc, argv); }
