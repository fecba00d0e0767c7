#pragma once

namespace fieldc {

// Command-line entry point. Exit codes: 0 success / property pass,
// 1 property fail, 2 usage or input errors.
int cliMain(int argc, const char* const* argv);

}  // namespace fieldc
