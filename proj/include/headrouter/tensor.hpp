#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace headrouter {

// Dense row-major float32 tensor. The on-disk form is little-endian with an
// "HRTN" magic; see write_tensor/read_tensor.
struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::vector<std::uint64_t> d, std::vector<float> values)
        : dims(std::move(d)), data(std::move(values)) {}

    static Tensor zeros(std::vector<std::uint64_t> dims);

    std::uint64_t numel() const;

    // 2-D accessors; only meaningful for rank-2 tensors.
    std::uint64_t rows() const { return dims.empty() ? 0 : dims[0]; }
    std::uint64_t cols() const { return dims.size() < 2 ? 0 : dims[1]; }
    float& at(std::uint64_t r, std::uint64_t c) { return data[r * dims[1] + c]; }
    float at(std::uint64_t r, std::uint64_t c) const { return data[r * dims[1] + c]; }
};

// Throws Error(validation/non_finite) if dims and data disagree, a dim is
// zero, or any value is NaN/Inf.
void validate(const Tensor& t);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace headrouter
