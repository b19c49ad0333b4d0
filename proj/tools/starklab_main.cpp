#include "starklab/lab.hpp"

int main(int argc, char** argv) { return starklab::lab::run_cli(argc, argv); }
