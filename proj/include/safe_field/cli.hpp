#pragma once

namespace safe_field::cli {

// Exit codes: 0 ok, 1 verification or safety failure, 2 config error,
// 3 solver failure.
int run_command(int argc, char** argv);

}  // namespace safe_field::cli
