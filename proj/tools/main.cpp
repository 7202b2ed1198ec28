#include "sentiscope/cli.hpp"

int main(int argc, char** argv) { return sentiscope::run_cli(argc, argv); }
