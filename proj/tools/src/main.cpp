#include "kerrcat_app/commands.hpp"

int main(int argc, char** argv) { return kerrcat::app::run_cli(argc, argv); }
