#pragma once

#include <optional>
#include <span>
#include <string>

#include "headrouter/tensor.hpp"

namespace headrouter {

enum class Category { semantic, acoustic, mixed };

const char* category_name(Category c);
Category parse_category(const std::string& name);

// One input instance: text and audio hidden states plus the per-head Q/K
// projection matrices of the layer the probe reads from. Optional per-token
// energy and a category label ride along for calibration and reporting.
struct SampleBundle {
    Tensor text;    // n_text x d
    Tensor audio;   // n_audio x d
    Tensor q_proj;  // n_heads x d x d_k
    Tensor k_proj;  // n_heads x d x d_k
    std::optional<Tensor> energy;  // n_audio, nonnegative
    std::optional<Category> category;
    std::string sample_id;

    std::size_t n_text() const { return static_cast<std::size_t>(text.dims[0]); }
    std::size_t n_audio() const { return static_cast<std::size_t>(audio.dims[0]); }
    std::size_t n_heads() const { return static_cast<std::size_t>(q_proj.dims[0]); }
    std::size_t dim() const { return static_cast<std::size_t>(text.dims[1]); }
    std::size_t dim_k() const { return static_cast<std::size_t>(q_proj.dims[2]); }
};

void validate(const SampleBundle& bundle);

// A bundle lives in a directory: a manifest.json naming the member tensor
// files plus the tensors themselves.
SampleBundle load_bundle(const std::filesystem::path& dir);
void save_bundle(const std::filesystem::path& dir, const SampleBundle& bundle);

// Copy of the bundle keeping only the audio rows (and energy entries) at the
// given indices. Indices must be strictly increasing and in range.
SampleBundle restrict_audio(const SampleBundle& bundle, std::span<const std::size_t> indices);

}  // namespace headrouter
