// SPDX-License-Identifier: Apache-2.0

#include "urllc/cli/run.hpp"

int main(int argc, char** argv) { return urllc::cli::run(argc, argv); }
