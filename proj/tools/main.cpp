#include "checkin/cli.hpp"

int main(int argc, char** argv) { return checkin::cli::run(argc, argv); }
