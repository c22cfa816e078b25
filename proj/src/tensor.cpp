#include "guesr/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "guesr/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

namespace guesr {

Tensor::Tensor(int r, int c, std::vector<double> values) : rows(r), cols(c), v(std::move(values)) {
    if (int(v.size()) != r * c)
        throw ShapeError("tensor init: " + std::to_string(v.size()) + " values for shape " +
                         std::to_string(r) + "x" + std::to_string(c));
}

Tensor Tensor::scalar(double x) {
    Tensor t(1, 1);
    t.v[0] = x;
    return t;
}

Tensor Tensor::full(int r, int c, double x) {
    Tensor t(r, c);
    std::fill(t.v.begin(), t.v.end(), x);
    return t;
}

bool Tensor::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string shape_str(const Tensor& t) {
    return "(" + std::to_string(t.rows) + "x" + std::to_string(t.cols) + ")";
}

namespace {

constexpr char kMagic[8] = {'G', 'U', 'E', 'S', 'R', 'T', 'N', 'S'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T x{};
    is.read(reinterpret_cast<char*>(&x), sizeof(T));
    if (!is) throw ParseError("checkpoint truncated");
    return x;
}

}  // namespace

void save_tensors(const std::string& path, const std::map<std::string, Tensor>& tensors) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_raw(os, kVersion);
    write_raw(os, uint64_t(tensors.size()));
    for (const auto& [name, t] : tensors) {
        write_raw(os, uint32_t(name.size()));
        os.write(name.data(), std::streamsize(name.size()));
        write_raw(os, uint32_t(2));
        write_raw(os, uint64_t(t.rows));
        write_raw(os, uint64_t(t.cols));
        os.write(reinterpret_cast<const char*>(t.v.data()), std::streamsize(t.v.size() * sizeof(double)));
    }
    if (!os) throw Error("write failed: " + path);
}

std::map<std::string, Tensor> load_tensors(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("not a checkpoint file: " + path);
    const auto version = read_raw<uint32_t>(is);
    if (version != kVersion)
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    const auto count = read_raw<uint64_t>(is);
    std::map<std::string, Tensor> out;
    for (uint64_t i = 0; i < count; ++i) {
        const auto name_len = read_raw<uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const auto rank = read_raw<uint32_t>(is);
        if (rank != 2) throw ParseError("unsupported tensor rank " + std::to_string(rank));
        const int r = int(read_raw<uint64_t>(is));
        const int c = int(read_raw<uint64_t>(is));
        Tensor t(r, c);
        is.read(reinterpret_cast<char*>(t.v.data()), std::streamsize(t.v.size() * sizeof(double)));
        if (!is) throw ParseError("checkpoint truncated in tensor " + name);
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

}  // namespace guesr
