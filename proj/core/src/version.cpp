#include "hdp/version.hpp"

namespace hdp {

const char* version() { return HDP_VERSION_STRING; }

}  // namespace hdp
