#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sfn/dataset.hpp"
#include "sfn/image_io.hpp"
#include "sfn/rng.hpp"
#include "sfn/text.hpp"

namespace sfn {

// Distinct n-gram counts (n = 1..4) over tokenized answers, per ORIGINAL
// category: yes/no answers stay inside C1/C4 here, matching the convention
// of per-category answer statistics tables.
struct NGramTable {
    std::array<size_t, kNumOriginalCategories> unique_answers{};
    std::array<std::array<size_t, 4>, kNumOriginalCategories> counts{}; // [cat][order-1]
};

struct CategoryStats {
    size_t sample_count = 0;
    size_t class_count = 0;
    double median_class_frequency = 0.0;
    size_t classes_below_median = 0;
    // ordered by count desc, ties lexicographic, for deterministic output
    std::vector<std::pair<std::string, size_t>> answer_histogram;
    std::vector<std::pair<std::string, size_t>> question_prefix_histogram;
};

struct DistributionReport {
    std::array<CategoryStats, kNumCategories> per_category; // by derived category
};

// per derived category: validation answers absent from training, sorted
using CoverageReport = std::array<std::vector<std::string>, kNumCategories>;

namespace detail {

inline std::vector<std::pair<std::string, size_t>> ordered_histogram(
    const std::unordered_map<std::string, size_t>& h) {
    std::vector<std::pair<std::string, size_t>> v(h.begin(), h.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return v;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report file: " + p.string());
    return out;
}

} // namespace detail

// Per derived category: sample counts, answer-class histograms, question
// prefixes, and the skew statistics (median class frequency, classes below
// the median).
inline DistributionReport answer_class_stats(const DatasetSplit& split) {
    std::array<std::unordered_map<std::string, size_t>, kNumCategories> answers;
    std::array<std::unordered_map<std::string, size_t>, kNumCategories> prefixes;
    DistributionReport report;
    for (const auto& s : split.samples) {
        if (!s.answer)
            throw std::invalid_argument("answer_class_stats: sample " + s.image_id +
                                        " has no answer");
        const int c = category_index(s.derived_category);
        report.per_category[c].sample_count++;
        answers[c][normalize_answer(*s.answer)]++;
        std::string prefix;
        for (size_t i = 0; i < s.tokens.size() && i < 2; ++i) {
            if (i) prefix += ' ';
            prefix += s.tokens[i];
        }
        prefixes[c][prefix]++;
    }
    for (size_t c = 0; c < kNumCategories; ++c) {
        auto& st = report.per_category[c];
        st.answer_histogram = detail::ordered_histogram(answers[c]);
        st.question_prefix_histogram = detail::ordered_histogram(prefixes[c]);
        st.class_count = st.answer_histogram.size();
        if (st.class_count > 0) {
            std::vector<size_t> freqs;
            freqs.reserve(st.class_count);
            for (const auto& [_, n] : st.answer_histogram) freqs.push_back(n);
            std::sort(freqs.begin(), freqs.end());
            const size_t m = freqs.size();
            st.median_class_frequency =
                (m % 2 == 1) ? double(freqs[m / 2])
                             : 0.5 * (double(freqs[m / 2 - 1]) + double(freqs[m / 2]));
            st.classes_below_median = static_cast<size_t>(std::count_if(
                freqs.begin(), freqs.end(),
                [&](size_t f) { return double(f) < st.median_class_frequency; }));
        }
    }
    return report;
}

// Distinct n-grams over answer token sequences, per original category.
// Answers are tokenized with the same rule as questions.
inline NGramTable ngram_counts(const DatasetSplit& split) {
    std::array<std::unordered_set<std::string>, kNumOriginalCategories> uniq;
    std::array<std::array<std::unordered_set<std::string>, 4>, kNumOriginalCategories> grams;
    for (const auto& s : split.samples) {
        if (!s.answer)
            throw std::invalid_argument("ngram_counts: sample " + s.image_id + " has no answer");
        const int c = category_index(s.original_category);
        uniq[c].insert(normalize_answer(*s.answer));
        const auto toks = tokenize(*s.answer);
        for (size_t order = 1; order <= 4; ++order)
            collect_ngrams(toks, order, grams[c][order - 1]);
    }
    NGramTable t;
    for (size_t c = 0; c < kNumOriginalCategories; ++c) {
        t.unique_answers[c] = uniq[c].size();
        for (size_t o = 0; o < 4; ++o) t.counts[c][o] = grams[c][o].size();
    }
    return t;
}

// Merge both splits, Fisher-Yates shuffle with a seeded xoshiro256**, split
// off the first floor(N/20) samples as the new validation set.
inline std::pair<DatasetSplit, DatasetSplit> resample_split(const DatasetSplit& train,
                                                            const DatasetSplit& valid,
                                                            uint64_t seed) {
    std::vector<Sample> pool = train.samples;
    pool.insert(pool.end(), valid.samples.begin(), valid.samples.end());
    const size_t n = pool.size();
    if (n < 20)
        throw std::invalid_argument("resample_split: need at least 20 samples to honor 19:1, got " +
                                    std::to_string(n));
    Rng rng(seed);
    rng.shuffle(pool);
    const size_t n_valid = n / 20;

    SplitProvenance prov;
    prov.source_files = train.provenance.source_files;
    prov.source_files.insert(prov.source_files.end(), valid.provenance.source_files.begin(),
                             valid.provenance.source_files.end());
    prov.resample = std::to_string(seed);
    prov.ratio = "19:1";

    DatasetSplit new_valid, new_train;
    new_valid.samples.assign(pool.begin(), pool.begin() + n_valid);
    new_train.samples.assign(pool.begin() + n_valid, pool.end());
    new_valid.provenance = prov;
    new_train.provenance = prov;
    return {std::move(new_train), std::move(new_valid)};
}

// Validation answers never seen in training, per derived category.
inline CoverageReport coverage_report(const DatasetSplit& train, const DatasetSplit& valid) {
    std::array<std::unordered_set<std::string>, kNumCategories> seen;
    for (const auto& s : train.samples)
        if (s.answer) seen[category_index(s.derived_category)].insert(normalize_answer(*s.answer));
    std::array<std::set<std::string>, kNumCategories> unseen;
    for (const auto& s : valid.samples) {
        if (!s.answer) continue;
        const int c = category_index(s.derived_category);
        const std::string a = normalize_answer(*s.answer);
        if (!seen[c].count(a)) unseen[c].insert(a);
    }
    CoverageReport report;
    for (size_t c = 0; c < kNumCategories; ++c)
        report[c].assign(unseen[c].begin(), unseen[c].end());
    return report;
}

inline void emit_report(const DistributionReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        auto out = detail::open_out(out_dir / "categories.csv");
        out << "category,count\n";
        for (size_t c = 0; c < kNumCategories; ++c)
            out << category_name(category_from_index(int(c))) << ","
                << report.per_category[c].sample_count << "\n";
    }
    {
        auto out = detail::open_out(out_dir / "skew.csv");
        out << "category,classes,median_frequency,classes_below_median\n";
        for (size_t c = 0; c < kNumCategories; ++c) {
            const auto& st = report.per_category[c];
            out << category_name(category_from_index(int(c))) << "," << st.class_count << ","
                << st.median_class_frequency << "," << st.classes_below_median << "\n";
        }
    }
    std::vector<std::pair<std::string, size_t>> cat_bars;
    for (size_t c = 0; c < kNumCategories; ++c)
        cat_bars.emplace_back(category_name(category_from_index(int(c))),
                              report.per_category[c].sample_count);
    write_bar_chart(out_dir / "categories.png", "samples per derived category", cat_bars);

    for (size_t c = 0; c < kNumCategories; ++c) {
        const std::string cat = category_name(category_from_index(int(c)));
        const auto& st = report.per_category[c];
        {
            auto out = detail::open_out(out_dir / ("answers_" + cat + ".csv"));
            out << "answer,count\n";
            for (const auto& [a, n] : st.answer_histogram)
                out << detail::csv_field(a) << "," << n << "\n";
        }
        {
            auto out = detail::open_out(out_dir / ("questions_" + cat + ".csv"));
            out << "prefix,count\n";
            for (const auto& [p, n] : st.question_prefix_histogram)
                out << detail::csv_field(p) << "," << n << "\n";
        }
        write_bar_chart(out_dir / ("answers_" + cat + ".png"), "answer classes: " + cat,
                        st.answer_histogram);
        write_bar_chart(out_dir / ("questions_" + cat + ".png"), "question prefixes: " + cat,
                        st.question_prefix_histogram);
    }
}

inline void emit_report(const NGramTable& table, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto out = detail::open_out(out_dir / "ngrams.csv");
    out << "category,unique_answers,unigram,bigram,trigram,fourgram\n";
    for (size_t c = 0; c < kNumOriginalCategories; ++c) {
        out << category_name(category_from_index(int(c))) << "," << table.unique_answers[c];
        for (size_t o = 0; o < 4; ++o) out << "," << table.counts[c][o];
        out << "\n";
    }
}

inline void emit_report(const CoverageReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto out = detail::open_out(out_dir / "coverage.csv");
    out << "category,unseen_answer\n";
    for (size_t c = 0; c < kNumCategories; ++c)
        for (const auto& a : report[c])
            out << category_name(category_from_index(int(c))) << "," << detail::csv_field(a)
                << "\n";
}

} // namespace sfn
