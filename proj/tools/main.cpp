// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdoob/cli.hpp"

int main(int argc, char** argv) { return qdoob::cli_main(argc, argv); }
