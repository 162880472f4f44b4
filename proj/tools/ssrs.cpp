#include "ssrs/cli.hpp"

int main(int argc, char** argv) { return ssrs::run_cli(argc, argv); }
