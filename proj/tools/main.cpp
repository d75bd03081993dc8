#include "crowd/cli.hpp"

int main(int argc, char** argv) { return crowd::cli_dispatch(argc, argv); }
