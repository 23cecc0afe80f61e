#include "splitres/version.hpp"

namespace splitres {

std::string_view version() { return SPLITRES_VERSION; }

}  // namespace splitres
