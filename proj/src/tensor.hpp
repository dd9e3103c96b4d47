#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sdtgcn {

// Dense row-major matrix of 64-bit floats. All model state and intermediate
// values are 2-D; higher-rank data (time-stacked embeddings, conv kernels)
// is represented as row blocks or vectors of Tensor.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Tensor(std::size_t r, std::size_t c, std::vector<double> d);

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t size() const { return rows * cols; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    std::string shape_str() const;
};

bool all_finite(const Tensor& t);

// Value-level helpers (no gradient recording).
Tensor matmul_value(const Tensor& a, const Tensor& b);
Tensor transpose_value(const Tensor& a);

}  // namespace sdtgcn
