#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfn/dataset.hpp"
#include "sfn/nn.hpp"

namespace sfn {

// ---------------------------------------------------------------------------
// word embeddings + LSTM; the question representation is the final hidden
// state over the true token sequence (an empty question encodes one pad token)
// ---------------------------------------------------------------------------

template <class T>
struct QuestionEncoder {
    Embedding<T> embed;
    Lstm<T> lstm;

    struct Cache {
        std::vector<int> ids;
        std::vector<T> embedded; // [len, De]
        typename Lstm<T>::Cache lstm;
        std::vector<T> h; // [Dq]
    };

    void init(size_t vocab_size, size_t embed_dim, size_t q_dim, Rng& rng) {
        embed.init(vocab_size, embed_dim, rng);
        lstm.init(embed_dim, q_dim, rng);
    }

    size_t out_dim() const { return lstm.hidden; }

    const std::vector<T>& forward(const std::vector<int>& token_ids, Cache& cache) const {
        cache.ids = token_ids.empty() ? std::vector<int>{Vocabulary::kPad} : token_ids;
        cache.embedded.resize(cache.ids.size() * embed.dim);
        embed.forward(cache.ids, cache.embedded.data());
        cache.h.resize(lstm.hidden);
        lstm.forward(cache.embedded.data(), cache.ids.size(), cache.lstm, cache.h.data());
        return cache.h;
    }

    void backward(const Cache& cache, const T* gh, QuestionEncoder<T>& g) const {
        std::vector<T> gx(cache.ids.size() * embed.dim, T(0));
        lstm.backward(cache.lstm, gh, gx.data(), g.lstm);
        embed.backward(cache.ids, gx.data(), g.embed);
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        embed.collect(prefix + ".embed", out);
        lstm.collect(prefix + ".lstm", out);
    }
};

// ---------------------------------------------------------------------------
// convolutional backbone: conv/relu stages with interleaved max pooling,
// 224x224x3 in, (C, 7, 7) out. `small` trains from scratch at desk scale;
// `vgg16` mirrors the VGG-16 feature extractor and expects pretrained
// weights from an asset checkpoint.
// ---------------------------------------------------------------------------

template <class T>
struct ImageEncoder {
    struct Stage {
        Conv2d<T> conv;
        size_t pool = 1; // max-pool window after conv+relu; 1 = none
    };

    std::string arch;
    size_t stem_pool = 1; // pooling applied to the raw input before stage 0
    std::vector<Stage> stages;
    size_t out_channels = 0;
    size_t out_size = 7;

    struct Cache {
        std::vector<T> stem;                    // pooled input (stem_pool > 1)
        std::vector<int> stem_argmax;
        std::vector<std::vector<T>> conv_out;   // post-relu, per stage
        std::vector<std::vector<T>> pooled;     // post-pool, per stage
        std::vector<std::vector<int>> argmax;   // pool argmax, per stage
        const T* input = nullptr;
        std::vector<size_t> dims;               // spatial side before each stage
    };

    static ImageEncoder small(Rng& rng) {
        ImageEncoder enc;
        enc.arch = "small";
        enc.stem_pool = 2;
        const size_t chans[] = {3, 8, 16, 32, 64};
        for (size_t i = 0; i < 4; ++i) {
            Stage s;
            s.conv.init(chans[i], chans[i + 1], 3, rng);
            s.pool = 2;
            enc.stages.push_back(std::move(s));
        }
        enc.out_channels = 64;
        return enc;
    }

    static ImageEncoder vgg16(Rng& rng) {
        ImageEncoder enc;
        enc.arch = "vgg16";
        enc.stem_pool = 1;
        const size_t cfg[] = {64, 64, 128, 128, 256, 256, 256, 512, 512, 512, 512, 512, 512};
        const bool pool_after[] = {false, true,  false, true,  false, false, true,
                                   false, false, true,  false, false, true};
        size_t in = 3;
        for (size_t i = 0; i < 13; ++i) {
            Stage s;
            s.conv.init(in, cfg[i], 3, rng);
            s.pool = pool_after[i] ? 2 : 1;
            in = cfg[i];
            enc.stages.push_back(std::move(s));
        }
        enc.out_channels = 512;
        return enc;
    }

    // x: [3, 224, 224] normalized; returns [out_channels, 7, 7]
    const std::vector<T>& forward(const T* x, size_t side, Cache& cache) const {
        cache.input = x;
        cache.conv_out.assign(stages.size(), {});
        cache.pooled.assign(stages.size(), {});
        cache.argmax.assign(stages.size(), {});
        cache.dims.clear();
        const T* cur = x;
        size_t ch = stages.front().conv.in_ch;
        if (stem_pool > 1) {
            side /= stem_pool;
            cache.stem.resize(ch * side * side);
            max_pool_forward(x, cache.stem.data(), ch, side * stem_pool, side * stem_pool,
                             stem_pool, &cache.stem_argmax);
            cur = cache.stem.data();
        }
        for (size_t k = 0; k < stages.size(); ++k) {
            const Stage& st = stages[k];
            cache.dims.push_back(side);
            cache.conv_out[k].resize(st.conv.out_ch * side * side);
            st.conv.forward(cur, cache.conv_out[k].data(), side, side);
            relu_inplace(cache.conv_out[k].data(), cache.conv_out[k].size());
            if (st.pool > 1) {
                const size_t oside = side / st.pool;
                cache.pooled[k].resize(st.conv.out_ch * oside * oside);
                max_pool_forward(cache.conv_out[k].data(), cache.pooled[k].data(), st.conv.out_ch,
                                 side, side, st.pool, &cache.argmax[k]);
                side = oside;
                cur = cache.pooled[k].data();
            } else {
                cur = cache.conv_out[k].data();
            }
            ch = st.conv.out_ch;
        }
        return stages.back().pool > 1 ? cache.pooled.back() : cache.conv_out.back();
    }

    // g_out: gradient at the output feature map; input gradients are dropped
    // (images are data, not parameters)
    void backward(const Cache& cache, const T* g_out, ImageEncoder<T>& g) const {
        std::vector<T> grad;
        const T* gcur = g_out;
        for (size_t k = stages.size(); k-- > 0;) {
            const Stage& st = stages[k];
            const size_t side = cache.dims[k];
            std::vector<T> gconv(st.conv.out_ch * side * side, T(0));
            if (st.pool > 1) {
                max_pool_backward(gcur, gconv.data(), st.conv.out_ch, side, side, st.pool,
                                  cache.argmax[k]);
            } else {
                std::copy(gcur, gcur + gconv.size(), gconv.begin());
            }
            relu_backward(cache.conv_out[k].data(), gconv.data(), gconv.size());
            const T* in = k == 0 ? (stem_pool > 1 ? cache.stem.data() : cache.input)
                                 : (stages[k - 1].pool > 1 ? cache.pooled[k - 1].data()
                                                           : cache.conv_out[k - 1].data());
            if (k == 0) {
                st.conv.backward(in, gconv.data(), nullptr, g.stages[0].conv, side, side);
            } else {
                const size_t iside = side;
                std::vector<T> gin(stages[k - 1].conv.out_ch * iside * iside, T(0));
                st.conv.backward(in, gconv.data(), gin.data(), g.stages[k].conv, side, side);
                grad = std::move(gin);
                gcur = grad.data();
            }
        }
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        for (size_t k = 0; k < stages.size(); ++k)
            stages[k].conv.collect(prefix + ".conv" + std::to_string(k), out);
    }
};

// normalize decoded uint8 CHW pixels per backbone convention
template <class T>
inline void normalize_image(const uint8_t* chw, size_t n, const std::string& arch, T* out) {
    if (arch == "vgg16") {
        static const double mean[3] = {0.485, 0.456, 0.406};
        static const double stdev[3] = {0.229, 0.224, 0.225};
        const size_t plane = n / 3;
        for (size_t c = 0; c < 3; ++c)
            for (size_t p = 0; p < plane; ++p)
                out[c * plane + p] =
                    static_cast<T>((chw[c * plane + p] / 255.0 - mean[c]) / stdev[c]);
    } else {
        for (size_t i = 0; i < n; ++i) out[i] = static_cast<T>(chw[i] / 255.0);
    }
}

// ---------------------------------------------------------------------------
// image size cue: one FC layer with ReLU over (width, height) / 1024
// ---------------------------------------------------------------------------

inline constexpr double kSizeNormalizer = 1024.0;

template <class T>
struct SizeEncoder {
    Linear<T> fc;

    struct Cache {
        T x[2];
        std::vector<T> y; // post-relu
    };

    void init(size_t size_dim, Rng& rng) { fc.init(2, size_dim, rng); }

    size_t out_dim() const { return fc.out_dim; }

    const std::vector<T>& forward(int width, int height, Cache& cache) const {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("encode_image_size: dimensions must be positive");
        cache.x[0] = static_cast<T>(width / kSizeNormalizer);
        cache.x[1] = static_cast<T>(height / kSizeNormalizer);
        cache.y.resize(fc.out_dim);
        fc.forward(cache.x, cache.y.data());
        relu_inplace(cache.y.data(), cache.y.size());
        return cache.y;
    }

    void backward(const Cache& cache, const T* gy, SizeEncoder<T>& g) const {
        std::vector<T> gz(gy, gy + fc.out_dim);
        relu_backward(cache.y.data(), gz.data(), gz.size());
        fc.backward(cache.x, gz.data(), nullptr, g.fc);
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        fc.collect(prefix + ".fc", out);
    }
};

// ---------------------------------------------------------------------------
// GloVe-format embedding loader: one token per line followed by the vector.
// Tokens missing from the file get a seeded uniform(-0.05, 0.05) row that
// depends only on (seed, vocabulary index), not on file order.
// ---------------------------------------------------------------------------

template <class T>
inline Embedding<T> load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                    uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("embeddings file missing: " + path.string());

    std::unordered_map<std::string, std::vector<double>> rows;
    std::string line;
    size_t width = 0, line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        std::vector<double> vec;
        double x;
        while (ss >> x) vec.push_back(x);
        if (vec.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": no vector values");
        if (width == 0) width = vec.size();
        else if (vec.size() != width)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": inconsistent vector width (" + std::to_string(vec.size()) +
                                     " vs " + std::to_string(width) + ")");
        rows.emplace(std::move(token), std::move(vec));
    }
    if (width == 0) throw std::runtime_error("embeddings file empty: " + path.string());

    Embedding<T> table;
    table.vocab = vocab.size();
    table.dim = width;
    table.table.resize({vocab.size(), width});
    for (size_t i = 1; i < vocab.size(); ++i) {
        T* row = table.table.data() + i * width;
        auto it = rows.find(vocab.decode(static_cast<int>(i)));
        if (it != rows.end()) {
            for (size_t j = 0; j < width; ++j) row[j] = static_cast<T>(it->second[j]);
        } else {
            Rng rng(mix_seed(seed, i));
            for (size_t j = 0; j < width; ++j) row[j] = static_cast<T>(rng.uniform(-0.05, 0.05));
        }
    }
    return table; // row 0 (pad) stays zero
}

} // namespace sfn
