#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sfn/category.hpp"
#include "sfn/image_meta.hpp"
#include "sfn/text.hpp"

namespace sfn {

// One (image, question, answer) triple. Width/height are the original
// on-disk dimensions, recorded before any resize.
struct Sample {
    std::string image_id;
    std::filesystem::path image_path;
    Category original_category = Category::C1_Modality; // C1..C4 only
    Category derived_category = Category::C1_Modality;
    std::string question;
    std::vector<std::string> tokens;
    std::optional<std::string> answer; // absent for test samples
    int image_width = 0;
    int image_height = 0;
    // false for answerless samples: the categorizer decides Binary routing
    // at inference instead of the answer-derived label.
    bool category_from_answer = true;
};

struct SplitProvenance {
    std::vector<std::string> source_files;
    std::string resample = "original"; // or decimal seed of the resample shuffle
    std::string ratio;                 // e.g. "19:1" when resampled
};

struct DatasetSplit {
    std::vector<Sample> samples;
    SplitProvenance provenance;

    size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// Binary iff the trimmed+lowercased answer is exactly "yes" or "no".
inline Category derive_category(Category original, std::string_view answer) {
    return is_binary_answer(answer) ? Category::Binary : original;
}

// token -> contiguous index; 0 = pad, 1 = unk, rest in first-occurrence
// order over the training questions.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    Vocabulary() {
        add("<pad>");
        add("<unk>");
    }

    int add(const std::string& token) {
        auto it = index_.find(token);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(tokens_.size());
        tokens_.push_back(token);
        index_.emplace(token, id);
        return id;
    }

    int encode(const std::string& token) const {
        auto it = index_.find(token);
        return it == index_.end() ? kUnk : it->second;
    }

    std::vector<int> encode(const std::vector<std::string>& tokens) const {
        std::vector<int> ids;
        ids.reserve(tokens.size());
        for (const auto& t : tokens) ids.push_back(encode(t));
        return ids;
    }

    const std::string& decode(int id) const {
        if (id < 0 || id >= static_cast<int>(tokens_.size()))
            throw std::out_of_range("vocabulary index " + std::to_string(id));
        return tokens_[id];
    }

    bool contains(const std::string& token) const { return index_.count(token) > 0; }
    size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

// Exact-string answer -> class index, contiguous from 0 in first-occurrence
// order. Keys are trim+lowercase normalized and nothing else.
class AnswerDictionary {
public:
    AnswerDictionary() = default;
    explicit AnswerDictionary(Category cat) : category_(cat) {}

    int add(const std::string& normalized_answer) {
        auto it = index_.find(normalized_answer);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(answers_.size());
        answers_.push_back(normalized_answer);
        index_.emplace(normalized_answer, id);
        return id;
    }

    // -1 when unknown
    int lookup(const std::string& normalized_answer) const {
        auto it = index_.find(normalized_answer);
        return it == index_.end() ? -1 : it->second;
    }

    const std::string& answer_of(int cls) const {
        if (cls < 0 || cls >= static_cast<int>(answers_.size()))
            throw std::out_of_range("answer class " + std::to_string(cls));
        return answers_[cls];
    }

    Category category() const { return category_; }
    size_t size() const { return answers_.size(); }
    const std::vector<std::string>& answers() const { return answers_; }

private:
    Category category_ = Category::C1_Modality;
    std::vector<std::string> answers_;
    std::unordered_map<std::string, int> index_;
};

using AnswerDictionaries = std::array<AnswerDictionary, kNumCategories>;

namespace detail {

// question files are named <Category>_<split>.txt with Category in C1..C4;
// longer forms like C1_Modality_train.txt also start with the short tag.
inline Category category_from_filename(const std::filesystem::path& p) {
    const std::string stem = p.filename().string();
    auto underscore = stem.find('_');
    if (underscore == std::string::npos)
        throw std::runtime_error("cannot infer category from file name: " + p.string());
    return parse_original_category(stem.substr(0, underscore));
}

inline std::filesystem::path locate_image(const std::filesystem::path& image_dir,
                                          const std::string& image_id) {
    for (const char* ext : {".jpg", ".png"}) {
        std::filesystem::path p = image_dir / (image_id + ext);
        if (std::filesystem::exists(p)) return p;
    }
    throw std::runtime_error("missing image file for image_id '" + image_id + "' under " +
                             image_dir.string());
}

} // namespace detail

// Parse one pipe-delimited line: image_id|question or image_id|question|answer.
// The answer is everything after the second pipe, verbatim.
inline Sample parse_sample_line(const std::string& line, Category original,
                                const std::string& file, size_t line_no) {
    auto p1 = line.find('|');
    if (p1 == std::string::npos || p1 == 0)
        throw std::runtime_error(file + ":" + std::to_string(line_no) +
                                 ": malformed line (expected image_id|question[|answer])");
    auto p2 = line.find('|', p1 + 1);
    Sample s;
    s.image_id = line.substr(0, p1);
    s.original_category = original;
    if (p2 == std::string::npos) {
        s.question = line.substr(p1 + 1);
        s.answer = std::nullopt;
        s.derived_category = original;
        s.category_from_answer = false;
    } else {
        s.question = line.substr(p1 + 1, p2 - p1 - 1);
        s.answer = line.substr(p2 + 1);
        s.derived_category = derive_category(original, *s.answer);
        s.category_from_answer = true;
    }
    if (s.question.empty())
        throw std::runtime_error(file + ":" + std::to_string(line_no) + ": empty question field");
    s.tokens = tokenize(s.question);
    return s;
}

// Load samples from per-category question files. Ordering is deterministic:
// files in the given order, lines in file order.
inline DatasetSplit load_dataset(const std::vector<std::filesystem::path>& question_files,
                                 const std::filesystem::path& image_dir) {
    DatasetSplit split;
    std::unordered_map<std::string, std::pair<std::filesystem::path, ImageSize>> image_cache;
    for (const auto& file : question_files) {
        const Category original = detail::category_from_filename(file);
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot open question file: " + file.string());
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            Sample s = parse_sample_line(line, original, file.string(), line_no);
            auto it = image_cache.find(s.image_id);
            if (it == image_cache.end()) {
                auto path = detail::locate_image(image_dir, s.image_id);
                it = image_cache.emplace(s.image_id, std::make_pair(path, read_image_size(path)))
                         .first;
            }
            s.image_path = it->second.first;
            s.image_width = it->second.second.width;
            s.image_height = it->second.second.height;
            split.samples.push_back(std::move(s));
        }
        split.provenance.source_files.push_back(file.string());
    }
    return split;
}

// All distinct training-question tokens after pad/unk, first-occurrence order.
inline Vocabulary build_vocabulary(const DatasetSplit& train) {
    if (train.empty()) throw std::invalid_argument("build_vocabulary: empty training split");
    Vocabulary vocab;
    for (const auto& s : train.samples)
        for (const auto& t : s.tokens) vocab.add(t);
    return vocab;
}

// Five dictionaries keyed by derived category. Yes/no answers live only in
// the Binary dictionary, which is always exactly {yes, no}.
inline AnswerDictionaries build_answer_dictionaries(const DatasetSplit& train) {
    AnswerDictionaries dicts;
    for (size_t i = 0; i < kNumCategories; ++i)
        dicts[i] = AnswerDictionary(category_from_index(static_cast<int>(i)));
    dicts[category_index(Category::Binary)].add("yes");
    dicts[category_index(Category::Binary)].add("no");
    for (const auto& s : train.samples) {
        if (!s.answer)
            throw std::invalid_argument("build_answer_dictionaries: sample " + s.image_id +
                                        " has no answer");
        if (s.derived_category == Category::Binary) continue;
        dicts[category_index(s.derived_category)].add(normalize_answer(*s.answer));
    }
    return dicts;
}

// Union dictionary over all training answers (yes/no included), used by the
// single-classifier baseline. First-occurrence order over the split.
inline AnswerDictionary build_global_dictionary(const DatasetSplit& train) {
    AnswerDictionary dict;
    for (const auto& s : train.samples) {
        if (!s.answer)
            throw std::invalid_argument("build_global_dictionary: sample " + s.image_id +
                                        " has no answer");
        dict.add(normalize_answer(*s.answer));
    }
    return dict;
}

} // namespace sfn
