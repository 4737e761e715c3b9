#include "commands.hpp"

int main(int argc, char** argv) { return basisid::cli::run(argc, argv); }
