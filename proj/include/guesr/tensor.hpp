#pragma once

#include <map>
#include <string>
#include <vector>

namespace guesr {

// Dense row-major matrix of 64-bit reals. Scalars are 1x1, row vectors 1xN.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(size_t(r) * size_t(c), 0.0) {}
    Tensor(int r, int c, std::vector<double> values);

    static Tensor scalar(double x);
    static Tensor full(int r, int c, double x);

    double& at(int r, int c) { return v[size_t(r) * cols + c]; }
    double at(int r, int c) const { return v[size_t(r) * cols + c]; }

    int numel() const { return rows * cols; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;
};

std::string shape_str(const Tensor& t);

// Checkpoint container: magic, version, then named tensors as
// (name, shape, little-endian 64-bit floats).
void save_tensors(const std::string& path, const std::map<std::string, Tensor>& tensors);
std::map<std::string, Tensor> load_tensors(const std::string& path);

}  // namespace guesr
