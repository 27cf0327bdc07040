#pragma once

namespace varcast {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace varcast
