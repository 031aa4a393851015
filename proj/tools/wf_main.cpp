#include "wf/harness.hpp"

int main(int argc, char** argv) { return wf::cli_main(argc, argv); }
