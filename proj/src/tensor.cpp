#include "headrouter/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "headrouter/errors.hpp"

namespace headrouter {

namespace {

constexpr char kMagic[4] = {'H', 'R', 'T', 'N'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kMaxRank = 32;

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t load_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t load_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::uint64_t> dims) {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    Tensor t;
    t.dims = std::move(dims);
    t.data.assign(static_cast<std::size_t>(n), 0.0f);
    return t;
}

std::uint64_t Tensor::numel() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

void validate(const Tensor& t) {
    if (t.dims.empty()) {
        throw Error(ErrorKind::validation, "tensor must have at least one dimension");
    }
    if (t.dims.size() > kMaxRank) {
        throw Error(ErrorKind::validation, "tensor rank exceeds " + std::to_string(kMaxRank));
    }
    std::uint64_t n = 1;
    for (auto d : t.dims) {
        if (d == 0) throw Error(ErrorKind::validation, "tensor dimensions must be positive");
        if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
            throw Error(ErrorKind::validation, "tensor element count overflows");
        }
        n *= d;
    }
    if (n != t.data.size()) {
        throw Error(ErrorKind::validation,
                    "tensor data length " + std::to_string(t.data.size()) +
                        " does not match dims product " + std::to_string(n));
    }
    for (float v : t.data) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::non_finite, "tensor contains a non-finite value");
        }
    }
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
    validate(t);

    std::vector<unsigned char> header;
    header.insert(header.end(), kMagic, kMagic + 4);
    append_u32(header, kFormatVersion);
    append_u32(header, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) append_u64(header, d);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(header.data()),
              static_cast<std::streamsize>(header.size()));

    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    } else {
        std::vector<unsigned char> payload;
        payload.reserve(t.data.size() * 4);
        for (float v : t.data) append_u32(payload, std::bit_cast<std::uint32_t>(v));
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
    }
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::error_code ec;
    const std::uint64_t file_size = std::filesystem::file_size(path, ec);
    if (ec) throw Error(ErrorKind::io, "cannot stat: " + path.string());

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open for reading: " + path.string());

    unsigned char fixed[12];
    if (file_size < sizeof(fixed) || !in.read(reinterpret_cast<char*>(fixed), sizeof(fixed))) {
        throw Error(ErrorKind::truncated, "tensor file too short for header: " + path.string());
    }
    if (std::memcmp(fixed, kMagic, 4) != 0) {
        throw Error(ErrorKind::bad_magic, "not a tensor file (bad magic): " + path.string());
    }
    const std::uint32_t version = load_u32(fixed + 4);
    if (version != kFormatVersion) {
        throw Error(ErrorKind::version_mismatch,
                    "unsupported tensor format version " + std::to_string(version));
    }
    const std::uint32_t rank = load_u32(fixed + 8);
    if (rank == 0 || rank > kMaxRank) {
        throw Error(ErrorKind::validation, "invalid tensor rank " + std::to_string(rank));
    }
    const std::uint64_t header_size = 12 + 8ull * rank;
    if (file_size < header_size) {
        throw Error(ErrorKind::truncated, "tensor file too short for dims: " + path.string());
    }

    Tensor t;
    t.dims.resize(rank);
    std::uint64_t n = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        unsigned char buf[8];
        in.read(reinterpret_cast<char*>(buf), 8);
        t.dims[i] = load_u64(buf);
        if (t.dims[i] == 0) {
            throw Error(ErrorKind::validation, "tensor dimensions must be positive");
        }
        if (n > std::numeric_limits<std::uint64_t>::max() / t.dims[i]) {
            throw Error(ErrorKind::validation, "tensor element count overflows");
        }
        n *= t.dims[i];
    }
    if (n > std::numeric_limits<std::uint64_t>::max() / 4) {
        throw Error(ErrorKind::validation, "tensor element count overflows");
    }

    const std::uint64_t payload = file_size - header_size;
    if (payload < n * 4) {
        throw Error(ErrorKind::truncated, "tensor payload truncated: " + path.string());
    }
    if (payload > n * 4) {
        throw Error(ErrorKind::validation, "tensor file has trailing bytes: " + path.string());
    }

    t.data.resize(static_cast<std::size_t>(n));
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(n * 4));
    } else {
        std::vector<unsigned char> raw(static_cast<std::size_t>(n * 4));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        for (std::uint64_t i = 0; i < n; ++i) {
            t.data[static_cast<std::size_t>(i)] =
                std::bit_cast<float>(load_u32(raw.data() + 4 * i));
        }
    }
    if (!in) throw Error(ErrorKind::io, "read failed: " + path.string());

    for (float v : t.data) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::non_finite,
                        "tensor contains a non-finite value: " + path.string());
        }
    }
    return t;
}

}  // namespace headrouter
