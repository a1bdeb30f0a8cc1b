#include "redqsim/cli.h"

int main(int argc, char** argv) { return redqsim::cli::main(argc, argv); }
