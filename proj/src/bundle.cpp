#include "headrouter/bundle.hpp"

#include <fstream>

#include <json.hpp>

#include "headrouter/errors.hpp"

namespace headrouter {

using nlohmann::json;

const char* category_name(Category c) {
    switch (c) {
        case Category::semantic: return "semantic";
        case Category::acoustic: return "acoustic";
        case Category::mixed: return "mixed";
    }
    return "unknown";
}

Category parse_category(const std::string& name) {
    if (name == "semantic") return Category::semantic;
    if (name == "acoustic") return Category::acoustic;
    if (name == "mixed") return Category::mixed;
    throw Error(ErrorKind::validation, "unknown category: " + name);
}

void validate(const SampleBundle& bundle) {
    validate(bundle.text);
    validate(bundle.audio);
    validate(bundle.q_proj);
    validate(bundle.k_proj);

    if (bundle.text.dims.size() != 2) {
        throw Error(ErrorKind::validation, "text embeddings must be a matrix");
    }
    if (bundle.audio.dims.size() != 2) {
        throw Error(ErrorKind::validation, "audio embeddings must be a matrix");
    }
    if (bundle.q_proj.dims.size() != 3 || bundle.k_proj.dims.size() != 3) {
        throw Error(ErrorKind::validation, "projections must be n_heads x d x d_k");
    }
    if (bundle.q_proj.dims != bundle.k_proj.dims) {
        throw Error(ErrorKind::validation, "q and k projections must share one shape");
    }
    const auto d = bundle.text.dims[1];
    if (bundle.audio.dims[1] != d) {
        throw Error(ErrorKind::validation, "text and audio embedding widths differ");
    }
    if (bundle.q_proj.dims[1] != d) {
        throw Error(ErrorKind::validation,
                    "projection rows must match the embedding width " + std::to_string(d));
    }
    if (bundle.energy) {
        validate(*bundle.energy);
        if (bundle.energy->dims.size() != 1 ||
            bundle.energy->dims[0] != bundle.audio.dims[0]) {
            throw Error(ErrorKind::validation, "energy length must equal the audio token count");
        }
        for (float v : bundle.energy->data) {
            if (v < 0.0f) {
                throw Error(ErrorKind::validation, "energy entries must be nonnegative");
            }
        }
    }
}

SampleBundle load_bundle(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw Error(ErrorKind::io, "cannot open bundle manifest: " + manifest_path.string());

    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation,
                    "malformed bundle manifest " + manifest_path.string() + ": " + e.what());
    }

    SampleBundle bundle;
    if (!manifest.contains("sample_id") || !manifest["sample_id"].is_string()) {
        throw Error(ErrorKind::validation, "bundle manifest lacks a sample_id");
    }
    bundle.sample_id = manifest["sample_id"].get<std::string>();
    if (manifest.contains("category")) {
        bundle.category = parse_category(manifest["category"].get<std::string>());
    }

    if (!manifest.contains("tensors") || !manifest["tensors"].is_object()) {
        throw Error(ErrorKind::validation, "bundle manifest lacks a tensors table");
    }
    const auto& tensors = manifest["tensors"];
    auto member = [&](const char* name) -> Tensor {
        if (!tensors.contains(name)) {
            throw Error(ErrorKind::validation,
                        std::string("bundle manifest missing required tensor: ") + name);
        }
        return read_tensor(dir / tensors[name].get<std::string>());
    };
    bundle.text = member("text");
    bundle.audio = member("audio");
    bundle.q_proj = member("q_proj");
    bundle.k_proj = member("k_proj");
    if (tensors.contains("energy")) {
        bundle.energy = read_tensor(dir / tensors["energy"].get<std::string>());
    }

    validate(bundle);
    return bundle;
}

void save_bundle(const std::filesystem::path& dir, const SampleBundle& bundle) {
    validate(bundle);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create bundle directory: " + dir.string());

    write_tensor(dir / "text.hrtn", bundle.text);
    write_tensor(dir / "audio.hrtn", bundle.audio);
    write_tensor(dir / "q_proj.hrtn", bundle.q_proj);
    write_tensor(dir / "k_proj.hrtn", bundle.k_proj);

    json tensors = {
        {"text", "text.hrtn"},
        {"audio", "audio.hrtn"},
        {"q_proj", "q_proj.hrtn"},
        {"k_proj", "k_proj.hrtn"},
    };
    if (bundle.energy) {
        write_tensor(dir / "energy.hrtn", *bundle.energy);
        tensors["energy"] = "energy.hrtn";
    }

    json manifest = {
        {"sample_id", bundle.sample_id},
        {"tensors", tensors},
    };
    if (bundle.category) manifest["category"] = category_name(*bundle.category);

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write bundle manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::io, "manifest write failed in " + dir.string());
}

SampleBundle restrict_audio(const SampleBundle& bundle, std::span<const std::size_t> indices) {
    const std::size_t n_audio = bundle.n_audio();
    const std::size_t d = bundle.dim();
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= n_audio || (i > 0 && indices[i] <= indices[i - 1])) {
            throw Error(ErrorKind::validation, "restriction indices must be increasing and in range");
        }
    }
    if (indices.empty()) {
        throw Error(ErrorKind::validation, "cannot restrict a bundle to zero audio tokens");
    }

    SampleBundle out = bundle;
    out.audio = Tensor::zeros({indices.size(), d});
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const float* src = bundle.audio.data.data() + indices[i] * d;
        std::copy(src, src + d, out.audio.data.data() + i * d);
    }
    if (bundle.energy) {
        Tensor e = Tensor::zeros({indices.size()});
        for (std::size_t i = 0; i < indices.size(); ++i) {
            e.data[i] = bundle.energy->data[indices[i]];
        }
        out.energy = std::move(e);
    }
    return out;
}

}  // namespace headrouter
