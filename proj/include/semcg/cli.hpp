#pragma once

namespace semcg {

// Entry point of the command-line front end (solve / analyze / model /
// reconcile). Returns the process exit code: 0 success, 2 configuration
// error, 3 solver failure (divergence or non-SPD operator), 1 other errors.
int cli_main(int argc, const char* const* argv);

}  // namespace semcg
