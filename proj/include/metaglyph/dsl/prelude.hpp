#pragma once

#include <string_view>

namespace metaglyph::dsl {

/// Name under which the prelude can be `input`.
inline constexpr std::string_view kPreludeName = "plain_ex";

/// Standard nib helpers and length units, written in the glyph language.
std::string_view prelude_source();

}  // namespace metaglyph::dsl
