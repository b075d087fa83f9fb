#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfn/dataset.hpp"
#include "sfn/rng.hpp"

namespace sfn {

// Per-sample positive weights aligned with a split. Samples sharing an
// answer class share a weight.
struct SampleWeights {
    std::vector<double> weights;

    void validate() const {
        for (size_t i = 0; i < weights.size(); ++i)
            if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
                throw std::invalid_argument("sample weight " + std::to_string(i) +
                                            " must be positive and finite");
    }
};

// Inverse class frequency within the sample's derived category: each answer
// class then receives equal total mass, so no class dominates batches.
inline SampleWeights compute_weights(const DatasetSplit& split, const AnswerDictionaries& dicts) {
    std::array<std::vector<size_t>, kNumCategories> class_counts;
    for (size_t c = 0; c < kNumCategories; ++c)
        class_counts[c].assign(dicts[c].size(), 0);

    std::vector<int> classes(split.size(), -1);
    for (size_t i = 0; i < split.size(); ++i) {
        const Sample& s = split.samples[i];
        if (!s.answer)
            throw std::invalid_argument("compute_weights: sample " + s.image_id + " has no answer");
        const int c = category_index(s.derived_category);
        const int cls = dicts[c].lookup(normalize_answer(*s.answer));
        if (cls < 0)
            throw std::invalid_argument("compute_weights: answer of sample " + s.image_id +
                                        " ('" + normalize_answer(*s.answer) +
                                        "') is not in the " + category_name(s.derived_category) +
                                        " dictionary");
        classes[i] = cls;
        class_counts[c][cls]++;
    }

    SampleWeights w;
    w.weights.resize(split.size());
    for (size_t i = 0; i < split.size(); ++i) {
        const int c = category_index(split.samples[i].derived_category);
        w.weights[i] = 1.0 / double(class_counts[c][classes[i]]);
    }
    return w;
}

// Draws i.i.d. with replacement, P(i) proportional to weights[i]. Owns its
// xoshiro state; one sampler per training loop.
class WeightedSampler {
public:
    WeightedSampler(SampleWeights weights, uint64_t seed)
        : weights_(std::move(weights)), rng_(seed) {
        if (weights_.weights.empty())
            throw std::invalid_argument("WeightedSampler: empty weight vector");
        weights_.validate();
        cumulative_.resize(weights_.weights.size());
        double acc = 0.0;
        for (size_t i = 0; i < weights_.weights.size(); ++i) {
            acc += weights_.weights[i];
            cumulative_[i] = acc;
        }
        total_ = acc;
    }

    size_t draw() {
        const double u = rng_.next_double() * total_;
        // first index whose cumulative weight exceeds u
        size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] > u) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

    std::vector<size_t> sample_indices(size_t batch_size) {
        if (batch_size < 1) throw std::invalid_argument("sample_indices: batch_size must be >= 1");
        std::vector<size_t> idx(batch_size);
        for (auto& i : idx) i = draw();
        return idx;
    }

    size_t population() const { return weights_.weights.size(); }

private:
    SampleWeights weights_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
    Rng rng_;
};

} // namespace sfn
