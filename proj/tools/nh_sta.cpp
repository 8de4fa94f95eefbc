#include "nhsta/experiment/cli.hpp"

int main(int argc, char** argv) { return nhsta::experiment::run(argc, argv); }
