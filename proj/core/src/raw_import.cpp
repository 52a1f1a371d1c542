#include "hdp/raw_import.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>

#include <zlib.h>

#include "hdp/errors.hpp"

namespace hdp {
namespace {

namespace fs = std::filesystem;

constexpr int kFilmFeatureDim = 932;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t le(const std::string& buf, std::size_t pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > buf.size()) throw DataError("truncated zip archive");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(buf[pos + static_cast<std::size_t>(i)]);
  }
  return v;
}

std::string inflate_raw(std::string_view compressed, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw DataError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw DataError("corrupt deflate stream in npz member");
  return out;
}

NpyArray parse_npy(const std::string& blob, const std::string& member) {
  if (blob.size() < 10 || blob.compare(0, 6, "\x93NUMPY") != 0) {
    throw DataError("npz member " + member + " is not an npy array");
  }
  const int major = static_cast<unsigned char>(blob[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = le(blob, 8, 2);
    offset = 10;
  } else {
    header_len = le(blob, 8, 4);
    offset = 12;
  }
  const std::string header = blob.substr(offset, header_len);
  const std::size_t data_start = offset + header_len;

  auto field = [&](const std::string& key) {
    const std::size_t k = header.find("'" + key + "'");
    if (k == std::string::npos) throw DataError("npy header of " + member + " lacks " + key);
    return k + key.size() + 2;
  };
  NpyArray arr;
  {
    std::size_t p = header.find('\'', field("descr"));
    const std::size_t q = header.find('\'', p + 1);
    arr.dtype = header.substr(p + 1, q - p - 1);
  }
  {
    const std::size_t open = header.find('(', field("shape"));
    const std::size_t close = header.find(')', open);
    std::string dims = header.substr(open + 1, close - open - 1);
    std::size_t start = 0;
    while (start < dims.size()) {
      std::size_t comma = dims.find(',', start);
      if (comma == std::string::npos) comma = dims.size();
      std::string tok = dims.substr(start, comma - start);
      tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
      if (!tok.empty()) arr.shape.push_back(std::stoll(tok));
      start = comma + 1;
    }
  }
  if (header.find("'fortran_order': True") != std::string::npos && arr.shape.size() > 1) {
    throw DataError("fortran-ordered npy arrays are not supported");
  }
  std::int64_t count = 1;
  for (auto d : arr.shape) count *= d;

  int width = 0;
  if (arr.dtype == "|b1" || arr.dtype == "|u1" || arr.dtype == "|i1") {
    width = 1;
  } else if (arr.dtype == "<i4") {
    width = 4;
  } else if (arr.dtype == "<i8") {
    width = 8;
  } else {
    throw DataError("unsupported npy dtype " + arr.dtype + " in " + member);
  }
  if (data_start + static_cast<std::size_t>(count * width) > blob.size()) {
    throw DataError("npy payload of " + member + " is truncated");
  }
  arr.values.resize(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const std::size_t pos = data_start + static_cast<std::size_t>(i * width);
    std::uint64_t raw = le(blob, pos, width);
    std::int64_t v = 0;
    if (width == 4) {
      v = static_cast<std::int32_t>(raw);
    } else if (width == 1 && arr.dtype == "|i1") {
      v = static_cast<std::int8_t>(raw);
    } else {
      v = static_cast<std::int64_t>(raw);
    }
    arr.values[static_cast<std::size_t>(i)] = v;
  }
  return arr;
}

std::vector<std::string_view> split_view(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T number(std::string_view tok, const fs::path& file, std::size_t line) {
  while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\r')) tok.remove_suffix(1);
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DataError(file.string() + ":" + std::to_string(line) + ": cannot parse '" +
                    std::string(tok) + "'");
  }
  return v;
}

fs::path find_split_file(const fs::path& raw_dir, int split_id) {
  const std::string suffix = "_" + std::to_string(split_id) + ".npz";
  for (const fs::path& dir : {raw_dir, raw_dir / "splits"}) {
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> hits;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string fname = entry.path().filename().string();
      if (fname.size() > suffix.size() &&
          fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0) {
        hits.push_back(entry.path());
      }
    }
    std::sort(hits.begin(), hits.end());
    if (!hits.empty()) return hits.front();
  }
  return {};
}

}  // namespace

std::map<std::string, NpyArray> read_npz(const fs::path& path) {
  const std::string buf = slurp(path);
  // End of central directory: scan backwards for its signature.
  if (buf.size() < 22) throw DataError(path.string() + " is not a zip archive");
  std::size_t eocd = std::string::npos;
  for (std::size_t i = buf.size() - 22 + 1; i-- > 0;) {
    if (le(buf, i, 4) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw DataError(path.string() + " is not a zip archive");
  const std::uint64_t entries = le(buf, eocd + 10, 2);
  std::size_t pos = le(buf, eocd + 16, 4);

  std::map<std::string, NpyArray> out;
  for (std::uint64_t e = 0; e < entries; ++e) {
    if (le(buf, pos, 4) != 0x02014b50) throw DataError(path.string() + ": bad central directory");
    const auto method = le(buf, pos + 10, 2);
    std::uint64_t csize = le(buf, pos + 20, 4);
    std::uint64_t usize = le(buf, pos + 24, 4);
    const auto name_len = le(buf, pos + 28, 2);
    const auto extra_len = le(buf, pos + 30, 2);
    const auto comment_len = le(buf, pos + 32, 2);
    std::uint64_t local = le(buf, pos + 42, 4);
    std::string name = buf.substr(pos + 46, name_len);

    // Zip64 extended information replaces saturated 32-bit fields in order.
    std::size_t x = pos + 46 + name_len;
    const std::size_t x_end = x + extra_len;
    while (x + 4 <= x_end) {
      const auto id = le(buf, x, 2);
      const auto len = le(buf, x + 2, 2);
      if (id == 0x0001) {
        std::size_t f = x + 4;
        if (usize == 0xFFFFFFFFu) { usize = le(buf, f, 8); f += 8; }
        if (csize == 0xFFFFFFFFu) { csize = le(buf, f, 8); f += 8; }
        if (local == 0xFFFFFFFFu) { local = le(buf, f, 8); f += 8; }
      }
      x += 4 + len;
    }
    pos = x_end + comment_len;

    if (le(buf, local, 4) != 0x04034b50) throw DataError(path.string() + ": bad local header");
    const std::size_t data = local + 30 + le(buf, local + 26, 2) + le(buf, local + 28, 2);
    if (data + csize > buf.size()) throw DataError(path.string() + ": truncated member " + name);
    std::string blob;
    if (method == 0) {
      blob = buf.substr(data, csize);
    } else if (method == 8) {
      blob = inflate_raw(std::string_view(buf).substr(data, csize), usize);
    } else {
      throw DataError(path.string() + ": unsupported compression method " + std::to_string(method));
    }
    if (name.size() > 4 && name.compare(name.size() - 4, 4, ".npy") == 0) name.resize(name.size() - 4);
    out.emplace(name, parse_npy(blob, name));
  }
  return out;
}

RawDataset import_geom_gcn(const fs::path& raw_dir, const std::string& name) {
  const fs::path edges_file = raw_dir / "out1_graph_edges.txt";
  const fs::path nodes_file = raw_dir / "out1_node_feature_label.txt";
  for (const fs::path& p : {edges_file, nodes_file}) {
    if (!fs::exists(p)) {
      throw DataError("unknown raw format in " + raw_dir.string() +
                      ": expected out1_graph_edges.txt and out1_node_feature_label.txt (missing " +
                      p.filename().string() + ")");
    }
  }
  const bool index_features = (name == "film" || name == "actor");

  struct NodeRow {
    std::vector<double> dense;
    std::vector<int> nonzero;
    int label = 0;
  };
  std::map<NodeId, NodeRow> nodes;
  {
    const std::string text = slurp(nodes_file);
    std::size_t line_no = 0;
    for (std::string_view line : split_view(text, '\n')) {
      ++line_no;
      if (line_no == 1 || line.empty() || line == "\r") continue;
      const auto cols = split_view(line, '\t');
      if (cols.size() != 3) {
        throw DataError(nodes_file.string() + ":" + std::to_string(line_no) +
                        ": expected id<TAB>features<TAB>label");
      }
      NodeRow row;
      for (std::string_view tok : split_view(cols[1], ',')) {
        if (index_features) {
          row.nonzero.push_back(number<int>(tok, nodes_file, line_no));
        } else {
          row.dense.push_back(number<double>(tok, nodes_file, line_no));
        }
      }
      row.label = number<int>(cols[2], nodes_file, line_no);
      nodes.emplace(number<NodeId>(cols[0], nodes_file, line_no), std::move(row));
    }
  }
  const NodeId n = static_cast<NodeId>(nodes.size());
  if (n == 0 || nodes.rbegin()->first != n - 1) {
    throw DataError(nodes_file.string() + ": node ids must be contiguous from 0");
  }

  RawDataset out;
  Graph& g = out.graph;
  g.name = name;
  g.num_nodes = n;
  const Eigen::Index f = index_features ? kFilmFeatureDim
                                        : static_cast<Eigen::Index>(nodes.begin()->second.dense.size());
  g.features = Matrix::Zero(n, f);
  g.labels.resize(static_cast<std::size_t>(n));
  int max_label = 0;
  for (const auto& [id, row] : nodes) {
    if (index_features) {
      for (int c : row.nonzero) {
        if (c < 0 || c >= f) throw DataError("feature index " + std::to_string(c) + " out of range");
        g.features(id, c) = 1.0;
      }
    } else {
      if (static_cast<Eigen::Index>(row.dense.size()) != f) {
        throw DataError(nodes_file.string() + ": node " + std::to_string(id) +
                        " has a different feature width");
      }
      for (Eigen::Index c = 0; c < f; ++c) g.features(id, c) = row.dense[static_cast<std::size_t>(c)];
    }
    g.labels[static_cast<std::size_t>(id)] = row.label;
    max_label = std::max(max_label, row.label);
  }
  g.num_classes = max_label + 1;

  {
    const std::string text = slurp(edges_file);
    std::size_t line_no = 0;
    for (std::string_view line : split_view(text, '\n')) {
      ++line_no;
      if (line_no == 1 || line.empty() || line == "\r") continue;
      const auto cols = split_view(line, '\t');
      if (cols.size() != 2) {
        throw DataError(edges_file.string() + ":" + std::to_string(line_no) + ": expected u<TAB>v");
      }
      const auto u = number<NodeId>(cols[0], edges_file, line_no);
      const auto v = number<NodeId>(cols[1], edges_file, line_no);
      if (u < 0 || v < 0 || u >= n || v >= n) {
        throw DataError(edges_file.string() + ":" + std::to_string(line_no) + ": endpoint out of range");
      }
      ++g.raw_edge_count;
      if (u != v) g.edges.push_back(Edge::canonical(u, v));
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.validate();

  for (int i = 0; i < 10; ++i) {
    const fs::path file = find_split_file(raw_dir, i);
    if (file.empty()) continue;
    const auto arrays = read_npz(file);
    SplitMasks s;
    s.split_id = i;
    const std::pair<const char*, std::vector<NodeId>*> parts[] = {
        {"train_mask", &s.train}, {"val_mask", &s.val}, {"test_mask", &s.test}};
    for (const auto& [key, target] : parts) {
      const auto it = arrays.find(key);
      if (it == arrays.end()) throw DataError(file.string() + " lacks " + key);
      if (it->second.values.size() != static_cast<std::size_t>(n)) {
        throw DataError(file.string() + ": " + key + " length does not match N");
      }
      for (NodeId v = 0; v < n; ++v) {
        if (it->second.values[static_cast<std::size_t>(v)] != 0) target->push_back(v);
      }
    }
    s.validate(n);
    out.splits.push_back(std::move(s));
  }
  return out;
}

}  // namespace hdp
