#include "liqsurf/cli.hpp"

int main(int argc, char** argv)
{
    return liqsurf::run_cli(argc, argv);
}
