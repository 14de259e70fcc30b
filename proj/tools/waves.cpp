#include "lwsw/cli.hpp"

int main(int argc, char** argv) { return lwsw::cli::run(argc, argv); }
