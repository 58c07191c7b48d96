#pragma once

namespace ftn {

inline constexpr const char* version_string = "0.1.0";

}
