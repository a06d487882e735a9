#pragma once

#include <string>
#include <string_view>

namespace tweetdyn {

/// Porter (1980) suffix-stripping stemmer, original rule set without later
/// extensions. Expects a lowercase ASCII word; anything containing other
/// bytes is returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace tweetdyn
