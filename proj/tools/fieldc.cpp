#include "fieldc/cli.hpp"

int main(int argc, char** argv) { return fieldc::cliMain(argc, argv); }
