#include "cli.hpp"

int main(int argc, char** argv)
{
	return spai::cli::run_cli(argc, argv);
}
