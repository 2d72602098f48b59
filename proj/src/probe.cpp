#include "headrouter/probe.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include <Eigen/Dense>

#include "headrouter/errors.hpp"

namespace headrouter {

namespace {

using MapF32 = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MapF64 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MapF64Mut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

int resolve_threads(int threads, std::size_t n_heads) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
    if (static_cast<std::size_t>(threads) > n_heads) threads = static_cast<int>(n_heads);
    return threads < 1 ? 1 : threads;
}

}  // namespace

std::pair<MatrixF64, MatrixF64> project_qk(const SampleBundle& bundle, std::size_t head) {
    const std::size_t n_heads = bundle.n_heads();
    if (head >= n_heads) {
        throw Error(ErrorKind::validation, "head index " + std::to_string(head) +
                                               " out of range (n_heads=" + std::to_string(n_heads) + ")");
    }
    const std::size_t n_text = bundle.n_text();
    const std::size_t n_audio = bundle.n_audio();
    const std::size_t d = bundle.dim();
    const std::size_t d_k = bundle.dim_k();

    MapF32 text(bundle.text.data.data(), static_cast<Eigen::Index>(n_text),
                static_cast<Eigen::Index>(d));
    MapF32 audio(bundle.audio.data.data(), static_cast<Eigen::Index>(n_audio),
                 static_cast<Eigen::Index>(d));
    MapF32 wq(bundle.q_proj.data.data() + head * d * d_k, static_cast<Eigen::Index>(d),
              static_cast<Eigen::Index>(d_k));
    MapF32 wk(bundle.k_proj.data.data() + head * d * d_k, static_cast<Eigen::Index>(d),
              static_cast<Eigen::Index>(d_k));

    MatrixF64 q(n_text, d_k);
    MatrixF64 k(n_audio, d_k);
    MapF64Mut(q.data.data(), static_cast<Eigen::Index>(n_text), static_cast<Eigen::Index>(d_k))
        .noalias() = text.cast<double>() * wq.cast<double>();
    MapF64Mut(k.data.data(), static_cast<Eigen::Index>(n_audio), static_cast<Eigen::Index>(d_k))
        .noalias() = audio.cast<double>() * wk.cast<double>();
    return {std::move(q), std::move(k)};
}

MatrixF64 head_affinity(const MatrixF64& q, const MatrixF64& k, std::size_t d_k) {
    if (d_k == 0) throw Error(ErrorKind::validation, "d_k must be positive");
    if (q.cols != d_k || k.cols != d_k) {
        throw Error(ErrorKind::validation, "Q and K must share the inner dimension d_k");
    }
    MatrixF64 a(q.rows, k.rows);
    MapF64 qm(q.data.data(), static_cast<Eigen::Index>(q.rows), static_cast<Eigen::Index>(q.cols));
    MapF64 km(k.data.data(), static_cast<Eigen::Index>(k.rows), static_cast<Eigen::Index>(k.cols));
    MapF64Mut(a.data.data(), static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols))
        .noalias() = qm * km.transpose() / std::sqrt(static_cast<double>(d_k));
    return a;
}

std::vector<double> softmax_row(const MatrixF64& affinity, std::size_t row) {
    if (row >= affinity.rows) {
        throw Error(ErrorKind::validation, "affinity row index out of range");
    }
    const auto r = affinity.row(row);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (double v : r) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::non_finite, "non-finite affinity value");
        }
        max_logit = std::max(max_logit, v);
    }
    std::vector<double> out(r.size());
    double denom = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        out[k] = std::exp(r[k] - max_logit);
        denom += out[k];
    }
    for (auto& v : out) v /= denom;
    return out;
}

std::vector<double> marginal_attention(const MatrixF64& affinity) {
    if (affinity.rows == 0 || affinity.cols == 0) {
        throw Error(ErrorKind::validation, "affinity matrix must be nonempty");
    }
    std::vector<double> p(affinity.cols, 0.0);
    for (std::size_t j = 0; j < affinity.rows; ++j) {
        const auto soft = softmax_row(affinity, j);
        for (std::size_t k = 0; k < p.size(); ++k) p[k] += soft[k];
    }
    const double inv = 1.0 / static_cast<double>(affinity.rows);
    for (auto& v : p) v *= inv;
    return p;
}

HeadMarginals probe_all_heads(const SampleBundle& bundle, int threads) {
    validate(bundle);
    const std::size_t n_heads = bundle.n_heads();
    const std::size_t n_audio = bundle.n_audio();

    HeadMarginals out;
    out.n_heads = n_heads;
    out.n_audio = n_audio;
    out.n_text_tokens = bundle.n_text();
    out.d_k = bundle.dim_k();
    out.p.assign(n_heads * n_audio, 0.0f);

    auto run_head = [&](std::size_t h) {
        auto [q, k] = project_qk(bundle, h);
        const auto a = head_affinity(q, k, bundle.dim_k());
        const auto p = marginal_attention(a);
        float* row = out.p.data() + h * n_audio;
        for (std::size_t i = 0; i < n_audio; ++i) row[i] = static_cast<float>(p[i]);
    };

    const int n_threads = resolve_threads(threads, n_heads);
    if (n_threads == 1) {
        for (std::size_t h = 0; h < n_heads; ++h) run_head(h);
        return out;
    }

    // Heads are independent and write to disjoint rows, so the result is
    // bit-identical for any thread count.
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t]() {
            try {
                for (std::size_t h = static_cast<std::size_t>(t); h < n_heads;
                     h += static_cast<std::size_t>(n_threads)) {
                    run_head(h);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace headrouter
