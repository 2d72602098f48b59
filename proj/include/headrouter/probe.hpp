#pragma once

#include <span>
#include <utility>
#include <vector>

#include "headrouter/bundle.hpp"

namespace headrouter {

// Small row-major double matrix used for probe intermediates. Dot products
// accumulate in 64-bit floats; only the final marginals are stored as f32.
struct MatrixF64 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    MatrixF64() = default;
    MatrixF64(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data).subspan(r * cols, cols);
    }
};

// Per-head marginal attention over audio tokens. Row h is a probability
// vector of length n_audio.
struct HeadMarginals {
    std::size_t n_heads = 0;
    std::size_t n_audio = 0;
    std::size_t n_text_tokens = 0;
    std::size_t d_k = 0;
    std::vector<float> p;  // row-major n_heads x n_audio

    std::span<const float> row(std::size_t h) const {
        return std::span<const float>(p).subspan(h * n_audio, n_audio);
    }
};

// Q = text * Wq[head], K = audio * Wk[head]. No positional transform is
// applied anywhere in the probe.
std::pair<MatrixF64, MatrixF64> project_qk(const SampleBundle& bundle, std::size_t head);

// A[j,k] = dot(Q[j], K[k]) / sqrt(d_k).
MatrixF64 head_affinity(const MatrixF64& q, const MatrixF64& k, std::size_t d_k);

// Overflow-safe softmax of one affinity row.
std::vector<double> softmax_row(const MatrixF64& affinity, std::size_t row);

// p[k] = mean over text rows of softmax_k(A[j,:]). The average runs over
// whatever text rows the bundle supplies; callers decide what counts as the
// text window. Throws on non-finite affinities.
std::vector<double> marginal_attention(const MatrixF64& affinity);

// Runs the probe for every head. Heads are independent, so the computation
// may be split across threads; results are bit-identical for any thread
// count. threads == 0 picks the hardware default.
HeadMarginals probe_all_heads(const SampleBundle& bundle, int threads = 0);

}  // namespace headrouter
