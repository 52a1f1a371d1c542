#pragma once

namespace hdp {

const char* version();

}  // namespace hdp
