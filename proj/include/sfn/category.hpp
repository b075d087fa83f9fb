#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sfn {

// C1..C4 are the file-level question categories; Binary is derived for
// samples whose answer is yes/no and never appears at file level.
enum class Category : int {
    C1_Modality = 0,
    C2_Plane = 1,
    C3_Organ = 2,
    C4_Abnormality = 3,
    Binary = 4,
};

inline constexpr size_t kNumCategories = 5;
inline constexpr size_t kNumOriginalCategories = 4;

inline constexpr std::array<Category, kNumCategories> kCategoryOrder = {
    Category::C1_Modality, Category::C2_Plane, Category::C3_Organ,
    Category::C4_Abnormality, Category::Binary,
};

inline const char* category_name(Category c) {
    switch (c) {
        case Category::C1_Modality: return "C1";
        case Category::C2_Plane: return "C2";
        case Category::C3_Organ: return "C3";
        case Category::C4_Abnormality: return "C4";
        case Category::Binary: return "Binary";
    }
    return "?";
}

inline const char* category_long_name(Category c) {
    switch (c) {
        case Category::C1_Modality: return "modality";
        case Category::C2_Plane: return "plane";
        case Category::C3_Organ: return "organ";
        case Category::C4_Abnormality: return "abnormality";
        case Category::Binary: return "binary";
    }
    return "?";
}

inline int category_index(Category c) { return static_cast<int>(c); }

inline Category category_from_index(int i) {
    if (i < 0 || i >= static_cast<int>(kNumCategories))
        throw std::out_of_range("category index " + std::to_string(i));
    return static_cast<Category>(i);
}

// "C1", "C2", ... ; Binary is not a valid file-level name.
inline Category parse_original_category(std::string_view name) {
    if (name == "C1") return Category::C1_Modality;
    if (name == "C2") return Category::C2_Plane;
    if (name == "C3") return Category::C3_Organ;
    if (name == "C4") return Category::C4_Abnormality;
    throw std::invalid_argument("not an original category name: " + std::string(name));
}

} // namespace sfn
