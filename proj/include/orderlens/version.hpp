#pragma once

namespace orderlens {

inline constexpr const char* kVersion = "0.1.0";

}
