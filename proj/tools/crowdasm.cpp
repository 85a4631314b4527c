#include "cli_app.hpp"

int main(int argc, char** argv) { return crowdasm::cli::execute(argc, argv); }
