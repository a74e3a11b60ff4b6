#pragma once

namespace walkforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;     // bad flags / malformed values
inline constexpr int kExitInput = 65;     // unusable input data
inline constexpr int kExitNotFound = 69;  // solve gave up within its budget

int dispatch(int argc, const char* const* argv);

}  // namespace walkforge::cli
