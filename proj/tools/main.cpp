// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/cli.hpp"

int main(int argc, char** argv)
{
    return conewalk::cli::run(argc, argv);
}
