#pragma once

namespace nehari {

inline constexpr const char* version = "0.1.0";

}
