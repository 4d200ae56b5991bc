#include "mpsched/cli.hpp"

int main(int argc, char** argv) {
    return mpsched::cli_main(argc, argv);
}
