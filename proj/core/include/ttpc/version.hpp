#pragma once

namespace ttpc {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever tokenization, tagging, or normalization output can change.
// Recorded in trained-pipeline archives so a loaded model refuses to serve
// with a different preprocessing stack than it was fitted with.
inline constexpr const char* kTextprepVersion = "1";

// Trained-pipeline archive format.
inline constexpr const char* kArchiveFormatVersion = "1";

}  // namespace ttpc
