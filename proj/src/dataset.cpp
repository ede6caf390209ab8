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

#include "qfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "qfl/error.hpp"
#include "qfl/rng.hpp"

namespace qfl {

namespace {

constexpr std::uint64_t kShardStream = 1;
constexpr std::uint64_t kSubsampleStream = 2;
constexpr std::uint64_t kSyntheticStream = 3;

std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t> &bytes,
                        std::size_t offset, const std::filesystem::path &path) {
    if (offset + 4 > bytes.size()) {
        throw FormatError(path.string() + ": truncated header at offset " +
                          std::to_string(offset));
    }
    return (std::uint32_t{bytes[offset]} << 24) |
           (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) |
           std::uint32_t{bytes[offset + 3]};
}

void put_le64(std::ostream &out, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

std::uint64_t get_le64(std::istream &in, const std::filesystem::path &path) {
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
        const int c = in.get();
        if (c == EOF) {
            throw FormatError(path.string() + ": truncated cache header");
        }
        value |= static_cast<std::uint64_t>(c & 0xFF) << (8 * i);
    }
    return value;
}

EncodedDataset avgpool(const RawDataset &raw, std::size_t num_features) {
    const auto [grid_rows, grid_cols] = avgpool_grid(num_features);
    if (raw.rows % grid_rows != 0 || raw.cols % grid_cols != 0) {
        throw ConfigError("image size does not tile into the pooling grid");
    }
    const std::size_t block_h = raw.rows / grid_rows;
    const std::size_t block_w = raw.cols / grid_cols;
    const double scale = 255.0 * static_cast<double>(block_h * block_w);
    EncodedDataset out;
    out.num_features = num_features;
    out.features.reserve(raw.size() * num_features);
    for (std::size_t n = 0; n < raw.size(); ++n) {
        const auto img = raw.image(n);
        for (std::size_t br = 0; br < grid_rows; ++br) {
            for (std::size_t bc = 0; bc < grid_cols; ++bc) {
                std::uint64_t sum = 0;
                for (std::size_t r = br * block_h; r < (br + 1) * block_h; ++r) {
                    for (std::size_t c = bc * block_w; c < (bc + 1) * block_w; ++c) {
                        sum += img[r * raw.cols + c];
                    }
                }
                out.features.push_back(static_cast<double>(sum) / scale);
            }
        }
    }
    return out;
}

void copy_labels(const RawDataset &raw, EncodedDataset &out) {
    out.num_classes = raw.class_digits.empty() ? 10 : raw.class_digits.size();
    out.labels.assign(raw.labels.begin(), raw.labels.end());
}

Eigen::MatrixXd pixel_matrix(const RawDataset &raw) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(raw.size()),
                      static_cast<Eigen::Index>(raw.image_size()));
    for (std::size_t n = 0; n < raw.size(); ++n) {
        const auto img = raw.image(n);
        for (std::size_t p = 0; p < img.size(); ++p) {
            x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p)) =
                img[p] / 255.0;
        }
    }
    return x;
}

} // namespace

EncodedDataset EncodedDataset::subset(std::span<const std::size_t> indices) const {
    EncodedDataset out;
    out.num_features = num_features;
    out.num_classes = num_classes;
    out.features.reserve(indices.size() * num_features);
    out.labels.reserve(indices.size());
    for (const auto i : indices) {
        if (i >= size()) {
            throw IndexError("sample index " + std::to_string(i) + " out of range");
        }
        const auto r = row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
    }
    return out;
}

RawDataset load_idx(const std::filesystem::path &images_path,
                    const std::filesystem::path &labels_path) {
    const auto images = read_file(images_path);
    const auto labels = read_file(labels_path);

    const auto image_magic = read_be32(images, 0, images_path);
    if (image_magic != kIdxImagesMagic) {
        throw FormatError(images_path.string() +
                          ": bad magic at offset 0 (expected 2051, got " +
                          std::to_string(image_magic) + ")");
    }
    const auto label_magic = read_be32(labels, 0, labels_path);
    if (label_magic != kIdxLabelsMagic) {
        throw FormatError(labels_path.string() +
                          ": bad magic at offset 0 (expected 2049, got " +
                          std::to_string(label_magic) + ")");
    }
    const std::size_t count = read_be32(images, 4, images_path);
    const std::size_t rows = read_be32(images, 8, images_path);
    const std::size_t cols = read_be32(images, 12, images_path);
    const std::size_t label_count = read_be32(labels, 4, labels_path);
    if (count != label_count) {
        throw FormatError("image count " + std::to_string(count) +
                          " (offset 4 of " + images_path.string() +
                          ") does not match label count " +
                          std::to_string(label_count) + " (offset 4 of " +
                          labels_path.string() + ")");
    }
    const std::size_t image_bytes = count * rows * cols;
    if (images.size() != 16 + image_bytes) {
        throw FormatError(images_path.string() + ": expected " +
                          std::to_string(16 + image_bytes) +
                          " bytes, file ends at offset " +
                          std::to_string(images.size()));
    }
    if (labels.size() != 8 + count) {
        throw FormatError(labels_path.string() + ": expected " +
                          std::to_string(8 + count) +
                          " bytes, file ends at offset " +
                          std::to_string(labels.size()));
    }
    RawDataset raw;
    raw.rows = rows;
    raw.cols = cols;
    raw.pixels.assign(images.begin() + 16, images.end());
    raw.labels.assign(labels.begin() + 8, labels.end());
    for (std::size_t i = 0; i < raw.labels.size(); ++i) {
        if (raw.labels[i] > 9) {
            throw FormatError(labels_path.string() + ": label " +
                              std::to_string(raw.labels[i]) + " at offset " +
                              std::to_string(8 + i) + " outside 0..9");
        }
    }
    return raw;
}

RawDataset select_digits(const RawDataset &raw, std::vector<int> digits) {
    std::sort(digits.begin(), digits.end());
    if (digits.size() < 2 || digits.size() > 3 ||
        std::adjacent_find(digits.begin(), digits.end()) != digits.end() ||
        digits.front() < 0 || digits.back() > 9) {
        throw ConfigError("digit set must hold 2 or 3 distinct digits in 0..9");
    }
    if (!raw.class_digits.empty()) {
        throw ConfigError("dataset is already restricted to a digit subset");
    }
    RawDataset out;
    out.rows = raw.rows;
    out.cols = raw.cols;
    out.class_digits = digits;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto it = std::find(digits.begin(), digits.end(), raw.labels[i]);
        if (it == digits.end()) {
            continue;
        }
        const auto img = raw.image(i);
        out.pixels.insert(out.pixels.end(), img.begin(), img.end());
        out.labels.push_back(static_cast<std::uint8_t>(it - digits.begin()));
    }
    if (out.size() == 0) {
        throw ConfigError("no samples match the requested digits");
    }
    return out;
}

std::string to_string(ReductionMethod method) {
    return method == ReductionMethod::AvgPool ? "avgpool" : "pca";
}

ReductionMethod parse_reduction_method(const std::string &name) {
    if (name == "avgpool") {
        return ReductionMethod::AvgPool;
    }
    if (name == "pca") {
        return ReductionMethod::Pca;
    }
    throw ConfigError("unknown feature method '" + name + "'");
}

std::pair<std::size_t, std::size_t> avgpool_grid(std::size_t num_features) {
    switch (num_features) {
    case 4:
        return {2, 2};
    case 8:
        return {2, 4};
    case 16:
        return {4, 4};
    default:
        throw ConfigError("feature count must be 4, 8 or 16, got " +
                          std::to_string(num_features));
    }
}

FeatureReducer FeatureReducer::fit(const RawDataset &train,
                                   std::size_t num_features,
                                   ReductionMethod method) {
    avgpool_grid(num_features);
    FeatureReducer reducer;
    reducer.method_ = method;
    reducer.num_features_ = num_features;
    if (method == ReductionMethod::AvgPool) {
        return reducer;
    }
    if (train.size() < 2) {
        throw ConfigError("PCA needs at least two training samples");
    }
    const Eigen::MatrixXd x = pixel_matrix(train);
    reducer.mean_ = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - reducer.mean_.transpose();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const auto k = static_cast<Eigen::Index>(num_features);
    // Eigenvalues ascend; take the last k columns, largest first.
    reducer.components_.resize(cov.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd v = eig.eigenvectors().col(cov.cols() - 1 - j);
        Eigen::Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0) {
            v = -v;
        }
        reducer.components_.col(j) = v;
    }
    const Eigen::MatrixXd projected = centered * reducer.components_;
    reducer.lower_ = projected.colwise().minCoeff().transpose();
    reducer.upper_ = projected.colwise().maxCoeff().transpose();
    return reducer;
}

EncodedDataset FeatureReducer::apply(const RawDataset &raw) const {
    EncodedDataset out;
    if (method_ == ReductionMethod::AvgPool) {
        out = avgpool(raw, num_features_);
    } else {
        if (raw.image_size() != static_cast<std::size_t>(mean_.size())) {
            throw ConfigError("image size differs from the PCA training split");
        }
        const Eigen::MatrixXd projected =
            (pixel_matrix(raw).rowwise() - mean_.transpose()) * components_;
        out.num_features = num_features_;
        out.features.reserve(raw.size() * num_features_);
        for (Eigen::Index n = 0; n < projected.rows(); ++n) {
            for (Eigen::Index j = 0; j < projected.cols(); ++j) {
                const double span = upper_(j) - lower_(j);
                const double scaled =
                    span > 0 ? (projected(n, j) - lower_(j)) / span : 0.0;
                out.features.push_back(std::clamp(scaled, 0.0, 1.0));
            }
        }
    }
    copy_labels(raw, out);
    return out;
}

EncodedDataset reduce_features(const RawDataset &raw, std::size_t num_features,
                               ReductionMethod method) {
    return FeatureReducer::fit(raw, num_features, method).apply(raw);
}

std::vector<EncodedDataset> shard(const EncodedDataset &dataset, std::size_t k,
                                  std::uint64_t seed) {
    const std::size_t n = dataset.size();
    if (k < 1 || k > n) {
        throw ConfigError("cannot split " + std::to_string(n) + " samples into " +
                          std::to_string(k) + " non-empty shards");
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    auto rng = seeded_stream(seed, kShardStream);
    rng.shuffle(order);
    std::vector<EncodedDataset> shards;
    shards.reserve(k);
    std::size_t begin = 0;
    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t len = n / k + (s < n % k ? 1 : 0);
        shards.push_back(
            dataset.subset(std::span(order).subspan(begin, len)));
        begin += len;
    }
    return shards;
}

EncodedDataset subsample(const EncodedDataset &dataset, std::size_t count,
                         std::uint64_t seed) {
    if (count == 0 || count >= dataset.size()) {
        return dataset;
    }
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    auto rng = seeded_stream(seed, kSubsampleStream);
    rng.shuffle(order);
    order.resize(count);
    return dataset.subset(order);
}

EncodedDataset synthetic_dataset(std::size_t num_features,
                                 std::size_t num_classes, std::size_t count,
                                 std::uint64_t seed) {
    if (num_features < 1 || num_classes < 2 || count < 1) {
        throw ConfigError("synthetic dataset needs >= 1 feature, >= 2 classes "
                          "and >= 1 sample");
    }
    auto rng = seeded_stream(seed, kSyntheticStream);
    EncodedDataset out;
    out.num_features = num_features;
    out.num_classes = num_classes;
    for (std::size_t n = 0; n < count; ++n) {
        for (std::size_t f = 0; f < num_features; ++f) {
            out.features.push_back(rng.uniform());
        }
        const double lead = out.features[n * num_features];
        out.labels.push_back(std::min(
            num_classes - 1,
            static_cast<std::size_t>(lead * static_cast<double>(num_classes))));
    }
    return out;
}

void write_encoded_cache(const std::filesystem::path &path,
                         const EncodedDataset &dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    put_le64(out, dataset.num_features);
    put_le64(out, dataset.size());
    put_le64(out, dataset.num_classes);
    for (const double value : dataset.features) {
        std::uint64_t bits = 0;
        static_assert(sizeof(bits) == sizeof(value));
        std::memcpy(&bits, &value, sizeof(bits));
        put_le64(out, bits);
    }
    for (const auto label : dataset.labels) {
        out.put(static_cast<char>(label));
    }
    if (!out) {
        throw FormatError("write failed for " + path.string());
    }
}

EncodedDataset read_encoded_cache(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    EncodedDataset out;
    out.num_features = get_le64(in, path);
    const std::uint64_t count = get_le64(in, path);
    out.num_classes = get_le64(in, path);
    if (out.num_features < 1 || out.num_features > 64 || out.num_classes < 1 ||
        out.num_classes > 256) {
        throw FormatError(path.string() + ": implausible cache header");
    }
    out.features.resize(count * out.num_features);
    for (auto &value : out.features) {
        const std::uint64_t bits = get_le64(in, path);
        std::memcpy(&value, &bits, sizeof(bits));
        if (!(value >= 0.0 && value <= 1.0)) {
            throw FormatError(path.string() + ": feature outside [0, 1]");
        }
    }
    out.labels.resize(count);
    for (auto &label : out.labels) {
        const int c = in.get();
        if (c == EOF) {
            throw FormatError(path.string() + ": truncated label block");
        }
        label = static_cast<std::size_t>(c);
        if (label >= out.num_classes) {
            throw FormatError(path.string() + ": label outside class range");
        }
    }
    if (in.get() != EOF) {
        throw FormatError(path.string() + ": trailing bytes after label block");
    }
    return out;
}

} // namespace qfl
