#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyncausal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Matrix entries with magnitude at or below this threshold are treated as
// structural zeros when deriving dependency patterns and graphs.
inline constexpr double kSparsityTol = 1e-12;

// A named coordinate block of a stacked state vector.
struct Block {
    std::string name;
    int dim = 1;
    int offset = 0;  // start index in the stacked vector
};

inline int total_dim(const std::vector<Block>& blocks) {
    int d = 0;
    for (const auto& b : blocks) d += b.dim;
    return d;
}

// Assigns offsets in declaration order and validates names/dimensions.
inline std::vector<Block> layout_blocks(std::vector<Block> blocks) {
    int off = 0;
    for (auto& b : blocks) {
        if (b.dim <= 0) throw std::invalid_argument("block '" + b.name + "' must have positive dimension");
        if (b.name.empty()) throw std::invalid_argument("block with empty name");
        b.offset = off;
        off += b.dim;
    }
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (blocks[i].name == blocks[j].name)
                throw std::invalid_argument("duplicate block name '" + blocks[i].name + "'");
    return blocks;
}

inline int find_block(const std::vector<Block>& blocks, const std::string& name) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].name == name) return static_cast<int>(i);
    return -1;
}

inline bool exact_equal(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

inline bool exact_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a.data()[i] != b.data()[i]) return false;
    return true;
}

struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoUniqueSolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyResultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dyncausal
