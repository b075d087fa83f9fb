#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace sfn {

inline constexpr int kModelImageSize = 224;

// Decoded image resized to the model input size, stored CHW, RGB, uint8.
struct ResizedImage {
    int orig_width = 0;
    int orig_height = 0;
    std::vector<uint8_t> chw; // 3 * 224 * 224
};

inline ResizedImage load_resized_image(const std::filesystem::path& path) {
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (img.empty()) throw std::runtime_error("cannot decode image: " + path.string());
    ResizedImage out;
    out.orig_width = img.cols;
    out.orig_height = img.rows;
    cv::Mat resized;
    cv::resize(img, resized, cv::Size(kModelImageSize, kModelImageSize), 0, 0, cv::INTER_AREA);
    out.chw.resize(3u * kModelImageSize * kModelImageSize);
    const size_t plane = size_t(kModelImageSize) * kModelImageSize;
    for (int y = 0; y < kModelImageSize; ++y) {
        const cv::Vec3b* row = resized.ptr<cv::Vec3b>(y);
        for (int x = 0; x < kModelImageSize; ++x) {
            const size_t p = size_t(y) * kModelImageSize + x;
            out.chw[0 * plane + p] = row[x][2]; // OpenCV is BGR; store RGB
            out.chw[1 * plane + p] = row[x][1];
            out.chw[2 * plane + p] = row[x][0];
        }
    }
    return out;
}

// Grayscale canvas -> PNG on disk. PNG encoding is deterministic for fixed
// pixels, which the synthetic generator relies on.
inline void write_gray_png(const std::filesystem::path& path,
                           const std::vector<uint8_t>& pixels, int width, int height) {
    if (pixels.size() != size_t(width) * height)
        throw std::invalid_argument("write_gray_png: pixel buffer does not match dimensions");
    cv::Mat img(height, width, CV_8UC1, const_cast<uint8_t*>(pixels.data()));
    if (!cv::imwrite(path.string(), img))
        throw std::runtime_error("cannot write image: " + path.string());
}

// Static bar chart mirroring the dataset-analysis figures.
inline void write_bar_chart(const std::filesystem::path& path, const std::string& title,
                            const std::vector<std::pair<std::string, size_t>>& bars) {
    const int width = 900, height = 480;
    const int margin_left = 60, margin_bottom = 110, margin_top = 50, margin_right = 20;
    cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
    cv::putText(canvas, title, {margin_left, 30}, cv::FONT_HERSHEY_SIMPLEX, 0.7,
                cv::Scalar(20, 20, 20), 1, cv::LINE_AA);
    size_t max_count = 1;
    for (const auto& [_, c] : bars) max_count = std::max(max_count, c);
    const int plot_w = width - margin_left - margin_right;
    const int plot_h = height - margin_top - margin_bottom;
    const int n = static_cast<int>(bars.size());
    cv::line(canvas, {margin_left, height - margin_bottom}, {width - margin_right, height - margin_bottom},
             cv::Scalar(0, 0, 0), 1);
    if (n > 0) {
        const double slot = double(plot_w) / n;
        for (int i = 0; i < n; ++i) {
            const double frac = double(bars[i].second) / double(max_count);
            const int bar_h = static_cast<int>(frac * plot_h);
            const int x0 = margin_left + static_cast<int>(i * slot) + 2;
            const int x1 = margin_left + static_cast<int>((i + 1) * slot) - 2;
            const int y1 = height - margin_bottom;
            cv::rectangle(canvas, {x0, y1 - bar_h}, {std::max(x0 + 1, x1), y1},
                          cv::Scalar(180, 120, 40), cv::FILLED);
            std::string label = bars[i].first;
            if (label.size() > 18) label = label.substr(0, 16) + "..";
            // rotated labels are not worth the trouble; clip and stagger instead
            const int ty = y1 + 16 + (i % 3) * 14;
            if (slot >= 12 || i % std::max(1, n / 40) == 0)
                cv::putText(canvas, label, {x0, ty}, cv::FONT_HERSHEY_SIMPLEX, 0.35,
                            cv::Scalar(60, 60, 60), 1, cv::LINE_AA);
        }
    }
    cv::putText(canvas, "max " + std::to_string(max_count), {margin_left, margin_top - 5},
                cv::FONT_HERSHEY_SIMPLEX, 0.45, cv::Scalar(90, 90, 90), 1, cv::LINE_AA);
    if (!cv::imwrite(path.string(), canvas))
        throw std::runtime_error("cannot write chart: " + path.string());
}

} // namespace sfn
