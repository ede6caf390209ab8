// Copyright 2026 The QFL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * MNIST IDX loading, digit selection, feature reduction to one value in
 * [0, 1] per qubit, and deterministic sharding across participants.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qfl {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct RawDataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// count x rows x cols pixel bytes, row-major per image.
    std::vector<std::uint8_t> pixels;
    /// Digit labels as loaded, or class indices after select_digits.
    std::vector<std::uint8_t> labels;
    /// Digit of each class index after select_digits; empty for raw data.
    std::vector<int> class_digits;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] std::size_t image_size() const { return rows * cols; }
    [[nodiscard]] std::span<const std::uint8_t> image(std::size_t i) const {
        return std::span(pixels).subspan(i * image_size(), image_size());
    }
};

struct EncodedDataset {
    std::size_t num_features = 0;
    std::size_t num_classes = 0;
    /// size() x num_features, row-major, every entry in [0, 1].
    std::vector<double> features;
    std::vector<std::size_t> labels;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span(features).subspan(i * num_features, num_features);
    }
    /// Rows in the order given by `indices`.
    [[nodiscard]] EncodedDataset subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const EncodedDataset &,
                           const EncodedDataset &) = default;
};

/// Parses an IDX3 image file and its IDX1 label file. Throws FormatError
/// with the byte offset of the first problem.
RawDataset load_idx(const std::filesystem::path &images_path,
                    const std::filesystem::path &labels_path);

/// Keeps samples whose digit is in `digits` (2 or 3 distinct values) in
/// their original order and relabels them 0..C-1 by ascending digit.
RawDataset select_digits(const RawDataset &raw, std::vector<int> digits);

enum class ReductionMethod { AvgPool, Pca };

std::string to_string(ReductionMethod method);
ReductionMethod parse_reduction_method(const std::string &name);

/// Block grid used by average pooling: 4 -> 2x2, 8 -> 2x4, 16 -> 4x4.
std::pair<std::size_t, std::size_t> avgpool_grid(std::size_t num_features);

/// Feature extractor fitted on a training split. Average pooling has no
/// fitted state; PCA keeps the mean, components and per-component range.
class FeatureReducer {
  public:
    static FeatureReducer fit(const RawDataset &train, std::size_t num_features,
                              ReductionMethod method);

    [[nodiscard]] EncodedDataset apply(const RawDataset &raw) const;

    [[nodiscard]] ReductionMethod method() const { return method_; }
    [[nodiscard]] std::size_t num_features() const { return num_features_; }

  private:
    ReductionMethod method_ = ReductionMethod::AvgPool;
    std::size_t num_features_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd components_; ///< pixels x num_features
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
};

/// Average pooling, or PCA fitted on `raw` itself.
EncodedDataset reduce_features(const RawDataset &raw, std::size_t num_features,
                               ReductionMethod method);

/// Seeded shuffle followed by a contiguous split; the first N mod K shards
/// hold one extra sample.
std::vector<EncodedDataset> shard(const EncodedDataset &dataset, std::size_t k,
                                  std::uint64_t seed);

/// `count` rows drawn without replacement by a seeded shuffle, kept in
/// shuffled order. count == 0 or count >= N returns the dataset unchanged.
EncodedDataset subsample(const EncodedDataset &dataset, std::size_t count,
                         std::uint64_t seed);

/// Uniform features in [0, 1]; class = floor(C * x_0).
EncodedDataset synthetic_dataset(std::size_t num_features,
                                 std::size_t num_classes, std::size_t count,
                                 std::uint64_t seed);

/// Flat cache: little-endian u64 U, N, C; N*U float64 features; N u8 labels.
void write_encoded_cache(const std::filesystem::path &path,
                         const EncodedDataset &dataset);
EncodedDataset read_encoded_cache(const std::filesystem::path &path);

} // namespace qfl
