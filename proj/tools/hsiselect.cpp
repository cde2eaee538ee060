#include <hsiselect/cli_main.hpp>

int main(int argc, char** argv) { return hsi::cli_main(argc, argv); }
