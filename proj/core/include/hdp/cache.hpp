#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "hdp/linalg.hpp"

namespace hdp {

// Dense matrix in a small binary format: "HDPM", int64 rows, int64 cols,
// then rows*cols little-endian doubles in row-major order.
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

// Directory of matrices addressed by string keys.
class MatrixCache {
 public:
  explicit MatrixCache(std::filesystem::path dir);

  std::filesystem::path path_for(const std::string& key) const;
  std::optional<Matrix> get(const std::string& key) const;
  void put(const std::string& key, const Matrix& m) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace hdp
