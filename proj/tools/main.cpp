#include <pdwg/cli.hpp>

int main(int argc, char** argv) { return pdwg::cli::run_main(argc, argv); }
