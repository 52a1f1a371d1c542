#include "hdp/cache.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "hdp/errors.hpp"

namespace hdp {

static_assert(std::endian::native == std::endian::little, "cache format assumes little-endian");

namespace {
constexpr char kMagic[4] = {'H', 'D', 'P', 'M'};
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw DataError("short write on " + path.string());
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[4];
  std::int64_t dims[2];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || std::char_traits<char>::compare(magic, kMagic, 4) != 0 || dims[0] < 0 || dims[1] < 0) {
    throw DataError("not a matrix file: " + path.string());
  }
  Matrix m(dims[0], dims[1]);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw DataError("truncated matrix file: " + path.string());
  return m;
}

MatrixCache::MatrixCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path MatrixCache::path_for(const std::string& key) const { return dir_ / (key + ".mat"); }

std::optional<Matrix> MatrixCache::get(const std::string& key) const {
  const auto p = path_for(key);
  if (!std::filesystem::exists(p)) return std::nullopt;
  return load_matrix(p);
}

void MatrixCache::put(const std::string& key, const Matrix& m) const {
  const auto final_path = path_for(key);
  const auto tmp = final_path.string() + ".tmp";
  save_matrix(tmp, m);
  std::filesystem::rename(tmp, final_path);
}

}  // namespace hdp
