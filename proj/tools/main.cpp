#include "mmswitch/cli.hpp"

int main(int argc, char** argv) { return mmswitch::cli_main(argc, argv); }
