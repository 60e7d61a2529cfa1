#include "cvqc/cli.hpp"

int main(int argc, char** argv) {
    return cvqc::cli::run(argc, argv);
}
