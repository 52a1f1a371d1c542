#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hdp {

// All dense intermediates are 64-bit, row-major so that a node's
// representation is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using ColVector = Eigen::Matrix<double, Eigen::Dynamic, 1>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;
using Triplet = Eigen::Triplet<double, std::int64_t>;

using NodeId = std::int32_t;

// Horizontal concatenation of sparse blocks with equal row counts.
SparseMatrix hstack(const SparseMatrix& left, const SparseMatrix& right);

// Row-wise argmax; ties resolve to the lowest column index.
std::vector<int> row_argmax(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace hdp
