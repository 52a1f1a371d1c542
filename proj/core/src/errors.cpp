#include "hdp/errors.hpp"

namespace hdp {

Error::Error(Category category, const std::string& what)
    : std::runtime_error(what), category_(category) {}

const char* Error::category_name() const noexcept {
  switch (category_) {
    case Category::kConfig:
      return "config";
    case Category::kData:
      return "data";
    case Category::kNumeric:
      return "numeric";
    case Category::kContract:
      return "contract";
  }
  return "unknown";
}

}  // namespace hdp
