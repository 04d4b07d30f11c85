#include "app.hpp"

int main(int argc, char** argv) { return rsq::app::run_cli(argc, argv); }
