#include "app/commands.hpp"

int main(int argc, char** argv) { return capdrop::cli::run_cli(argc, argv); }
