#pragma once

#include <string>
#include <string_view>

namespace ttpc {

/// Porter stemmer, steps 1a through 5b of the 1980 algorithm.
///
/// Expects a lowercase word. Words shorter than three letters and tokens
/// containing anything outside [a-z] (IDs, placeholders with digits) are
/// returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace ttpc
