#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfn/nn.hpp"

namespace sfn {

enum class FusionStage : int { I = 1, II = 2, III = 3 };

// Fused feature vector with its stage tag. Layout is fixed:
//   stage I   : [glimpse_0 ; ... ; glimpse_{G-1} ; question]
//   stage II  : [stage I ; size]
//   stage III : [stage II ; fact_C1 ; fact_C2 ; fact_C3]
template <class T>
struct FusedRep {
    FusionStage stage = FusionStage::I;
    std::vector<T> v;

    size_t width() const { return v.size(); }
};

// Output vectors of the three support networks, equal widths.
template <class T>
struct SupportingFacts {
    std::vector<T> modality; // C1
    std::vector<T> plane;    // C2
    std::vector<T> organ;    // C3

    void require_complete() const {
        if (modality.empty() || plane.empty() || organ.empty())
            throw std::invalid_argument("supporting facts incomplete: need modality, plane and organ");
        if (modality.size() != plane.size() || plane.size() != organ.size())
            throw std::invalid_argument("supporting fact widths differ");
    }
};

// ---------------------------------------------------------------------------
// Fusion I: question-driven attention over image feature positions.
// The question vector is tiled across the spatial grid, a 1x1 convolutional
// scorer (one linear map per position) produces G glimpse logit maps, and
// each glimpse is the attention-weighted sum of the feature columns.
// ---------------------------------------------------------------------------

template <class T>
struct AttentionFusion {
    size_t channels = 0, q_dim = 0, glimpses = 2;
    Linear<T> scorer; // [(C + Dq) -> G]

    struct Cache {
        const T* fmap = nullptr; // [C, H, W]
        size_t positions = 0;
        std::vector<T> q;
        std::vector<T> att; // [G, P] attention weights
    };

    void init(size_t feat_channels, size_t question_dim, size_t n_glimpses, Rng& rng) {
        channels = feat_channels;
        q_dim = question_dim;
        glimpses = n_glimpses;
        scorer.init(feat_channels + question_dim, n_glimpses, rng);
    }

    size_t out_dim() const { return glimpses * channels + q_dim; }

    FusedRep<T> forward(const T* fmap, size_t height, size_t width, const std::vector<T>& q,
                        Cache& cache) const {
        const size_t P = height * width;
        if (P == 0) throw std::invalid_argument("fusion_I_attend: empty spatial grid");
        cache.fmap = fmap;
        cache.positions = P;
        cache.q = q;

        // logits[g][p] = wf_g . f_p + wq_g . q + b_g ; the question term is
        // constant across positions
        std::vector<T> logits(glimpses * P);
        std::vector<T> q_term(glimpses);
        for (size_t g = 0; g < glimpses; ++g) {
            const T* wq = scorer.w.data() + g * scorer.in_dim + channels;
            T acc = scorer.b[g];
            for (size_t i = 0; i < q_dim; ++i) acc += wq[i] * q[i];
            q_term[g] = acc;
        }
        for (size_t p = 0; p < P; ++p) {
            for (size_t g = 0; g < glimpses; ++g) {
                const T* wf = scorer.w.data() + g * scorer.in_dim;
                T acc = q_term[g];
                for (size_t c = 0; c < channels; ++c) acc += wf[c] * fmap[c * P + p];
                logits[g * P + p] = acc;
            }
        }
        cache.att.resize(glimpses * P);
        for (size_t g = 0; g < glimpses; ++g)
            softmax(logits.data() + g * P, cache.att.data() + g * P, P);

        FusedRep<T> out;
        out.stage = FusionStage::I;
        out.v.assign(out_dim(), T(0));
        for (size_t g = 0; g < glimpses; ++g) {
            T* glimpse = out.v.data() + g * channels;
            const T* att = cache.att.data() + g * P;
            for (size_t c = 0; c < channels; ++c) {
                T acc = T(0);
                const T* row = fmap + c * P;
                for (size_t p = 0; p < P; ++p) acc += att[p] * row[p];
                glimpse[c] = acc;
            }
        }
        std::copy(q.begin(), q.end(), out.v.begin() + glimpses * channels);
        return out;
    }

    // g_fmap: [C, P] accumulated; g_q: [Dq] accumulated
    void backward(const Cache& cache, const T* g_out, T* g_fmap, T* g_q,
                  AttentionFusion<T>& g) const {
        const size_t P = cache.positions;
        const T* fmap = cache.fmap;
        std::vector<T> datt(P), dlogit(P);
        for (size_t gl = 0; gl < glimpses; ++gl) {
            const T* g_glimpse = g_out + gl * channels;
            const T* att = cache.att.data() + gl * P;

            // through the weighted sum
            for (size_t p = 0; p < P; ++p) {
                T acc = T(0);
                for (size_t c = 0; c < channels; ++c) acc += g_glimpse[c] * fmap[c * P + p];
                datt[p] = acc;
            }
            for (size_t c = 0; c < channels; ++c) {
                const T gc = g_glimpse[c];
                if (gc == T(0)) continue;
                T* grow = g_fmap + c * P;
                for (size_t p = 0; p < P; ++p) grow[p] += att[p] * gc;
            }

            // softmax jacobian
            T dot = T(0);
            for (size_t p = 0; p < P; ++p) dot += att[p] * datt[p];
            for (size_t p = 0; p < P; ++p) dlogit[p] = att[p] * (datt[p] - dot);

            // scorer parameters and inputs
            const T* wf = scorer.w.data() + gl * scorer.in_dim;
            const T* wq = wf + channels;
            T* gwf = g.scorer.w.data() + gl * scorer.in_dim;
            T* gwq = gwf + channels;
            T dsum = T(0);
            for (size_t p = 0; p < P; ++p) {
                const T d = dlogit[p];
                if (d == T(0)) continue;
                dsum += d;
                for (size_t c = 0; c < channels; ++c) {
                    gwf[c] += d * fmap[c * P + p];
                    g_fmap[c * P + p] += d * wf[c];
                }
            }
            g.scorer.b[gl] += dsum;
            for (size_t i = 0; i < q_dim; ++i) {
                gwq[i] += dsum * cache.q[i];
                g_q[i] += dsum * wq[i];
            }
        }
        const T* g_q_direct = g_out + glimpses * channels;
        for (size_t i = 0; i < q_dim; ++i) g_q[i] += g_q_direct[i];
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        scorer.collect(prefix + ".scorer", out);
    }
};

// ---------------------------------------------------------------------------
// Fusion II / III: plain concatenation with stage checks
// ---------------------------------------------------------------------------

template <class T>
inline FusedRep<T> fusion_concat_size(const FusedRep<T>& a, const std::vector<T>& size_enc) {
    if (a.stage != FusionStage::I)
        throw std::invalid_argument("fusion_II_concat: expected a stage-I representation");
    FusedRep<T> out;
    out.stage = FusionStage::II;
    out.v.reserve(a.v.size() + size_enc.size());
    out.v = a.v;
    out.v.insert(out.v.end(), size_enc.begin(), size_enc.end());
    return out;
}

template <class T>
inline FusedRep<T> fusion_concat_facts(const FusedRep<T>& b, const SupportingFacts<T>& facts) {
    if (b.stage != FusionStage::II)
        throw std::invalid_argument("fusion_III_concat: expected a stage-II representation");
    facts.require_complete();
    FusedRep<T> out;
    out.stage = FusionStage::III;
    out.v.reserve(b.v.size() + 3 * facts.modality.size());
    out.v = b.v;
    out.v.insert(out.v.end(), facts.modality.begin(), facts.modality.end());
    out.v.insert(out.v.end(), facts.plane.begin(), facts.plane.end());
    out.v.insert(out.v.end(), facts.organ.begin(), facts.organ.end());
    return out;
}

} // namespace sfn
