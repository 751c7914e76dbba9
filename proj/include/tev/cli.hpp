#pragma once

namespace tev::cli {

// Parses argv and dispatches to the selected subcommand.
// Exit codes: 0 success, 1 solver error (no root in range, factorization
// failure, ...), 2 configuration or parse error.
int run(int argc, const char* const* argv);

}  // namespace tev::cli
