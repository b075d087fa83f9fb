#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfn/rng.hpp"
#include "sfn/tensor.hpp"

namespace sfn {

template <class T>
struct NamedTensorRef {
    std::string name;
    Tensor<T>* tensor;
};

template <class T>
using ParamList = std::vector<NamedTensorRef<T>>;

template <class T>
inline void zero_params(ParamList<T>& params) {
    for (auto& p : params) p.tensor->zero();
}

// dst += src, entry-wise over parallel param lists
template <class T>
inline void accumulate_params(ParamList<T>& dst, const ParamList<T>& src) {
    for (size_t i = 0; i < dst.size(); ++i) {
        auto& d = dst[i].tensor->v;
        const auto& s = src[i].tensor->v;
        for (size_t j = 0; j < d.size(); ++j) d[j] += s[j];
    }
}

template <class T>
inline void glorot_init(Tensor<T>& w, size_t fan_in, size_t fan_out, Rng& rng) {
    const double a = std::sqrt(6.0 / double(fan_in + fan_out));
    for (auto& x : w.v) x = static_cast<T>(rng.uniform(-a, a));
}

template <class T>
inline void uniform_init(Tensor<T>& w, double lo, double hi, Rng& rng) {
    for (auto& x : w.v) x = static_cast<T>(rng.uniform(lo, hi));
}

// ---------------------------------------------------------------------------
// fully connected: y = W x + b
// ---------------------------------------------------------------------------

template <class T>
struct Linear {
    size_t in_dim = 0, out_dim = 0;
    Tensor<T> w; // [out, in]
    Tensor<T> b; // [out]

    void init(size_t in, size_t out, Rng& rng) {
        in_dim = in;
        out_dim = out;
        w.resize({out, in});
        b.resize({out});
        glorot_init(w, in, out, rng);
    }

    void forward(const T* x, T* y) const {
        const T* wp = w.data();
        for (size_t o = 0; o < out_dim; ++o) {
            T acc = b[o];
            const T* row = wp + o * in_dim;
            for (size_t i = 0; i < in_dim; ++i) acc += row[i] * x[i];
            y[o] = acc;
        }
    }

    // gx may be null when input gradients are not needed
    void backward(const T* x, const T* gy, T* gx, Linear<T>& g) const {
        for (size_t o = 0; o < out_dim; ++o) {
            const T go = gy[o];
            if (go == T(0)) continue;
            g.b[o] += go;
            T* gw_row = g.w.data() + o * in_dim;
            for (size_t i = 0; i < in_dim; ++i) gw_row[i] += go * x[i];
        }
        if (gx) {
            const T* wp = w.data();
            for (size_t o = 0; o < out_dim; ++o) {
                const T go = gy[o];
                if (go == T(0)) continue;
                const T* row = wp + o * in_dim;
                for (size_t i = 0; i < in_dim; ++i) gx[i] += go * row[i];
            }
        }
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".w", &w});
        out.push_back({prefix + ".b", &b});
    }
};

// ---------------------------------------------------------------------------
// embedding lookup; row 0 is the pad row and never receives gradient
// ---------------------------------------------------------------------------

template <class T>
struct Embedding {
    size_t vocab = 0, dim = 0;
    Tensor<T> table; // [V, D]

    void init(size_t vocab_size, size_t embed_dim, Rng& rng) {
        vocab = vocab_size;
        dim = embed_dim;
        table.resize({vocab, dim});
        uniform_init(table, -0.05, 0.05, rng);
        zero_pad_row();
    }

    void zero_pad_row() {
        std::fill(table.v.begin(), table.v.begin() + dim, T(0));
    }

    // ids -> [len, D]
    void forward(const std::vector<int>& ids, T* out) const {
        for (size_t t = 0; t < ids.size(); ++t) {
            const int id = ids[t];
            if (id < 0 || size_t(id) >= vocab)
                throw std::out_of_range("embedding index " + std::to_string(id));
            const T* row = table.data() + size_t(id) * dim;
            std::copy(row, row + dim, out + t * dim);
        }
    }

    void backward(const std::vector<int>& ids, const T* gout, Embedding<T>& g) const {
        for (size_t t = 0; t < ids.size(); ++t) {
            const int id = ids[t];
            if (id == 0) continue; // pad row stays fixed
            T* grow = g.table.data() + size_t(id) * dim;
            const T* grad = gout + t * dim;
            for (size_t i = 0; i < dim; ++i) grow[i] += grad[i];
        }
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".table", &table});
    }
};

// ---------------------------------------------------------------------------
// single-layer LSTM, gate order (i, f, g, o); returns the final hidden state
// ---------------------------------------------------------------------------

template <class T>
struct Lstm {
    size_t in_dim = 0, hidden = 0;
    Tensor<T> w_ih; // [4H, in]
    Tensor<T> w_hh; // [4H, H]
    Tensor<T> b;    // [4H]

    struct Cache {
        size_t len = 0;
        std::vector<T> x;     // [len, in]
        std::vector<T> gates; // [len, 4H] post-activation
        std::vector<T> c;     // [len, H]
        std::vector<T> h;     // [len, H]
    };

    void init(size_t in, size_t hidden_dim, Rng& rng) {
        in_dim = in;
        hidden = hidden_dim;
        w_ih.resize({4 * hidden, in});
        w_hh.resize({4 * hidden, hidden});
        b.resize({4 * hidden});
        const double k = 1.0 / std::sqrt(double(hidden));
        uniform_init(w_ih, -k, k, rng);
        uniform_init(w_hh, -k, k, rng);
    }

    static T sigmoid(T v) { return T(1) / (T(1) + std::exp(-v)); }

    // x: [len, in_dim]; h_final: [hidden]
    void forward(const T* x, size_t len, Cache& cache, T* h_final) const {
        if (len == 0) throw std::invalid_argument("Lstm::forward: empty sequence");
        const size_t H = hidden, G = 4 * H;
        cache.len = len;
        cache.x.assign(x, x + len * in_dim);
        cache.gates.assign(len * G, T(0));
        cache.c.assign(len * H, T(0));
        cache.h.assign(len * H, T(0));
        std::vector<T> pre(G);
        for (size_t t = 0; t < len; ++t) {
            const T* xt = x + t * in_dim;
            const T* h_prev = t ? cache.h.data() + (t - 1) * H : nullptr;
            const T* c_prev = t ? cache.c.data() + (t - 1) * H : nullptr;
            for (size_t r = 0; r < G; ++r) {
                T acc = b[r];
                const T* wi = w_ih.data() + r * in_dim;
                for (size_t i = 0; i < in_dim; ++i) acc += wi[i] * xt[i];
                if (h_prev) {
                    const T* wh = w_hh.data() + r * H;
                    for (size_t i = 0; i < H; ++i) acc += wh[i] * h_prev[i];
                }
                pre[r] = acc;
            }
            T* gates = cache.gates.data() + t * G;
            T* ct = cache.c.data() + t * H;
            T* ht = cache.h.data() + t * H;
            for (size_t i = 0; i < H; ++i) {
                const T gi = sigmoid(pre[i]);
                const T gf = sigmoid(pre[H + i]);
                const T gg = std::tanh(pre[2 * H + i]);
                const T go = sigmoid(pre[3 * H + i]);
                gates[i] = gi;
                gates[H + i] = gf;
                gates[2 * H + i] = gg;
                gates[3 * H + i] = go;
                const T cp = c_prev ? c_prev[i] : T(0);
                ct[i] = gf * cp + gi * gg;
                ht[i] = go * std::tanh(ct[i]);
            }
        }
        std::copy(cache.h.end() - H, cache.h.end(), h_final);
    }

    // gh_final: [hidden]; gx (optional): [len, in_dim]
    void backward(const Cache& cache, const T* gh_final, T* gx, Lstm<T>& g) const {
        const size_t H = hidden, G = 4 * H, len = cache.len;
        std::vector<T> gh(H), gc(H, T(0)), dpre(G);
        std::copy(gh_final, gh_final + H, gh.begin());
        for (size_t t = len; t-- > 0;) {
            const T* gates = cache.gates.data() + t * G;
            const T* ct = cache.c.data() + t * H;
            const T* c_prev = t ? cache.c.data() + (t - 1) * H : nullptr;
            const T* h_prev = t ? cache.h.data() + (t - 1) * H : nullptr;
            const T* xt = cache.x.data() + t * in_dim;
            for (size_t i = 0; i < H; ++i) {
                const T gi = gates[i], gf = gates[H + i], gg = gates[2 * H + i],
                        go = gates[3 * H + i];
                const T tc = std::tanh(ct[i]);
                const T dgo = gh[i] * tc;
                const T dc = gc[i] + gh[i] * go * (T(1) - tc * tc);
                const T cp = c_prev ? c_prev[i] : T(0);
                dpre[i] = dc * gg * gi * (T(1) - gi);
                dpre[H + i] = dc * cp * gf * (T(1) - gf);
                dpre[2 * H + i] = dc * gi * (T(1) - gg * gg);
                dpre[3 * H + i] = dgo * go * (T(1) - go);
                gc[i] = dc * gf;
            }
            for (size_t r = 0; r < G; ++r) {
                const T d = dpre[r];
                if (d == T(0)) continue;
                g.b[r] += d;
                T* gwi = g.w_ih.data() + r * in_dim;
                for (size_t i = 0; i < in_dim; ++i) gwi[i] += d * xt[i];
                if (h_prev) {
                    T* gwh = g.w_hh.data() + r * H;
                    for (size_t i = 0; i < H; ++i) gwh[i] += d * h_prev[i];
                }
            }
            if (gx) {
                T* gxt = gx + t * in_dim;
                for (size_t r = 0; r < G; ++r) {
                    const T d = dpre[r];
                    if (d == T(0)) continue;
                    const T* wi = w_ih.data() + r * in_dim;
                    for (size_t i = 0; i < in_dim; ++i) gxt[i] += d * wi[i];
                }
            }
            std::fill(gh.begin(), gh.end(), T(0));
            if (t > 0) {
                for (size_t r = 0; r < G; ++r) {
                    const T d = dpre[r];
                    if (d == T(0)) continue;
                    const T* wh = w_hh.data() + r * H;
                    for (size_t i = 0; i < H; ++i) gh[i] += d * wh[i];
                }
            }
        }
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".w_ih", &w_ih});
        out.push_back({prefix + ".w_hh", &w_hh});
        out.push_back({prefix + ".b", &b});
    }
};

// ---------------------------------------------------------------------------
// 2-d convolution, stride 1, same padding (ksize/2)
// ---------------------------------------------------------------------------

template <class T>
struct Conv2d {
    size_t in_ch = 0, out_ch = 0, ksize = 3;
    Tensor<T> w; // [out, in, k, k]
    Tensor<T> b; // [out]

    void init(size_t in, size_t out, size_t k, Rng& rng) {
        in_ch = in;
        out_ch = out;
        ksize = k;
        w.resize({out, in, k, k});
        b.resize({out});
        glorot_init(w, in * k * k, out * k * k, rng);
    }

    // x: [in_ch, H, W] -> y: [out_ch, H, W]
    void forward(const T* x, T* y, size_t H, size_t W) const {
        const size_t hw = H * W;
        const int k = int(ksize), pad = k / 2, iH = int(H), iW = int(W);
        for (size_t co = 0; co < out_ch; ++co) std::fill(y + co * hw, y + (co + 1) * hw, b[co]);
        for (size_t co = 0; co < out_ch; ++co) {
            T* yp = y + co * hw;
            for (size_t ci = 0; ci < in_ch; ++ci) {
                const T* xp = x + ci * hw;
                const T* wp = w.data() + (co * in_ch + ci) * ksize * ksize;
                for (int ky = 0; ky < k; ++ky) {
                    const int dy = ky - pad;
                    const int y0 = std::max(0, -dy), y1 = std::min(iH, iH - dy);
                    for (int kx = 0; kx < k; ++kx) {
                        const T wv = wp[ky * k + kx];
                        const int dx = kx - pad;
                        const int x0 = std::max(0, -dx), x1 = std::min(iW, iW - dx);
                        for (int yy = y0; yy < y1; ++yy) {
                            T* yrow = yp + size_t(yy) * W;
                            const T* xrow = xp + size_t(yy + dy) * W + dx;
                            for (int xx = x0; xx < x1; ++xx) yrow[xx] += wv * xrow[xx];
                        }
                    }
                }
            }
        }
    }

    void backward(const T* x, const T* gy, T* gx, Conv2d<T>& g, size_t H, size_t W) const {
        const size_t hw = H * W;
        const int k = int(ksize), pad = k / 2, iH = int(H), iW = int(W);
        for (size_t co = 0; co < out_ch; ++co) {
            const T* gyp = gy + co * hw;
            T acc = T(0);
            for (size_t p = 0; p < hw; ++p) acc += gyp[p];
            g.b[co] += acc;
            for (size_t ci = 0; ci < in_ch; ++ci) {
                const T* xp = x + ci * hw;
                T* gxp = gx ? gx + ci * hw : nullptr;
                const T* wp = w.data() + (co * in_ch + ci) * ksize * ksize;
                T* gwp = g.w.data() + (co * in_ch + ci) * ksize * ksize;
                for (int ky = 0; ky < k; ++ky) {
                    const int dy = ky - pad;
                    const int y0 = std::max(0, -dy), y1 = std::min(iH, iH - dy);
                    for (int kx = 0; kx < k; ++kx) {
                        const int dx = kx - pad;
                        const int x0 = std::max(0, -dx), x1 = std::min(iW, iW - dx);
                        T gw_acc = T(0);
                        const T wv = wp[ky * k + kx];
                        for (int yy = y0; yy < y1; ++yy) {
                            const T* gyrow = gyp + size_t(yy) * W;
                            const T* xrow = xp + size_t(yy + dy) * W + dx;
                            T* gxrow = gxp ? gxp + size_t(yy + dy) * W + dx : nullptr;
                            for (int xx = x0; xx < x1; ++xx) {
                                gw_acc += gyrow[xx] * xrow[xx];
                                if (gxrow) gxrow[xx] += wv * gyrow[xx];
                            }
                        }
                        gwp[ky * k + kx] += gw_acc;
                    }
                }
            }
        }
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".w", &w});
        out.push_back({prefix + ".b", &b});
    }
};

// ---------------------------------------------------------------------------
// max pooling with square window == stride; input dims must divide evenly
// ---------------------------------------------------------------------------

template <class T>
inline void max_pool_forward(const T* x, T* y, size_t C, size_t H, size_t W, size_t s,
                             std::vector<int>* argmax) {
    const size_t oh = H / s, ow = W / s;
    if (argmax) argmax->assign(C * oh * ow, 0);
    for (size_t c = 0; c < C; ++c) {
        const T* xp = x + c * H * W;
        T* yp = y + c * oh * ow;
        for (size_t py = 0; py < oh; ++py) {
            for (size_t px = 0; px < ow; ++px) {
                size_t best = (py * s) * W + px * s;
                T bv = xp[best];
                for (size_t dy = 0; dy < s; ++dy) {
                    const size_t row = (py * s + dy) * W + px * s;
                    for (size_t dx = 0; dx < s; ++dx) {
                        if (xp[row + dx] > bv) {
                            bv = xp[row + dx];
                            best = row + dx;
                        }
                    }
                }
                yp[py * ow + px] = bv;
                if (argmax) (*argmax)[c * oh * ow + py * ow + px] = static_cast<int>(best);
            }
        }
    }
}

template <class T>
inline void max_pool_backward(const T* gy, T* gx, size_t C, size_t H, size_t W, size_t s,
                              const std::vector<int>& argmax) {
    const size_t oh = H / s, ow = W / s;
    for (size_t c = 0; c < C; ++c) {
        const T* gyp = gy + c * oh * ow;
        T* gxp = gx + c * H * W;
        for (size_t p = 0; p < oh * ow; ++p) gxp[argmax[c * oh * ow + p]] += gyp[p];
    }
}

// ---------------------------------------------------------------------------
// activations, dropout, softmax / cross-entropy
// ---------------------------------------------------------------------------

template <class T>
inline void relu_inplace(T* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] = x[i] > T(0) ? x[i] : T(0);
}

// mask on the post-activation values: d(max(0,x)) = [y > 0]
template <class T>
inline void relu_backward(const T* y, T* gy, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (y[i] <= T(0)) gy[i] = T(0);
}

// Inverted dropout. Mask entries are 0 or 1/(1-p); an empty mask means
// evaluation mode (identity).
template <class T>
inline std::vector<T> make_dropout_mask(size_t n, double p, Rng& rng) {
    std::vector<T> mask(n);
    const T scale = static_cast<T>(1.0 / (1.0 - p));
    for (size_t i = 0; i < n; ++i) mask[i] = rng.next_double() < p ? T(0) : scale;
    return mask;
}

template <class T>
inline void apply_mask(T* x, const std::vector<T>& mask) {
    if (mask.empty()) return;
    for (size_t i = 0; i < mask.size(); ++i) x[i] *= mask[i];
}

template <class T>
inline void softmax(const T* logits, T* probs, size_t n) {
    T mx = logits[0];
    for (size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
    T sum = T(0);
    for (size_t i = 0; i < n; ++i) {
        probs[i] = std::exp(logits[i] - mx);
        sum += probs[i];
    }
    for (size_t i = 0; i < n; ++i) probs[i] /= sum;
}

// returns -log p(target); dlogits (optional) receives softmax(logits) - onehot
template <class T>
inline T cross_entropy(const T* logits, size_t n, int target, T* dlogits) {
    std::vector<T> probs(n);
    softmax(logits, probs.data(), n);
    const T p = std::max(probs[size_t(target)], T(1e-30));
    if (dlogits) {
        for (size_t i = 0; i < n; ++i) dlogits[i] = probs[i];
        dlogits[size_t(target)] -= T(1);
    }
    return -std::log(p);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// params/grads/m/v are parallel lists collected from structurally identical
// module instances. t counts steps from 1.
template <class T>
inline void adam_step(ParamList<T>& params, const ParamList<T>& grads, ParamList<T>& m,
                      ParamList<T>& v, const AdamConfig& cfg, int64_t t) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
    for (size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i].tensor->v;
        const auto& g = grads[i].tensor->v;
        auto& mi = m[i].tensor->v;
        auto& vi = v[i].tensor->v;
        for (size_t j = 0; j < p.size(); ++j) {
            const double gj = double(g[j]);
            mi[j] = T(cfg.beta1 * double(mi[j]) + (1.0 - cfg.beta1) * gj);
            vi[j] = T(cfg.beta2 * double(vi[j]) + (1.0 - cfg.beta2) * gj * gj);
            const double mhat = double(mi[j]) / bc1;
            const double vhat = double(vi[j]) / bc2;
            p[j] = T(double(p[j]) - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

} // namespace sfn
