#include "semcg/cli.hpp"

int main(int argc, char** argv) { return semcg::cli_main(argc, argv); }
