#pragma once

#include <string_view>

namespace splitres {

std::string_view version();

}  // namespace splitres
