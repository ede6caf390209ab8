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
#include <cstdlib>
#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "qfl/error.hpp"

namespace qfl {
namespace {

namespace fs = std::filesystem;

class TempDir {
  public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("qfl_dataset_" + std::to_string(counter_++) + "_" +
                 std::to_string(std::rand()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] const fs::path &path() const { return path_; }

  private:
    static inline int counter_ = 0;
    fs::path path_;
};

void PutBe32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void WriteBytes(const fs::path &path, const std::vector<std::uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> ImageFile(std::uint32_t count, std::uint32_t rows,
                                    std::uint32_t cols, std::uint8_t fill,
                                    std::uint32_t magic = 0x803) {
    std::vector<std::uint8_t> bytes;
    PutBe32(bytes, magic);
    PutBe32(bytes, count);
    PutBe32(bytes, rows);
    PutBe32(bytes, cols);
    bytes.insert(bytes.end(), std::size_t{count} * rows * cols, fill);
    return bytes;
}

std::vector<std::uint8_t> LabelFile(const std::vector<std::uint8_t> &labels,
                                    std::uint32_t magic = 0x801) {
    std::vector<std::uint8_t> bytes;
    PutBe32(bytes, magic);
    PutBe32(bytes, static_cast<std::uint32_t>(labels.size()));
    bytes.insert(bytes.end(), labels.begin(), labels.end());
    return bytes;
}

RawDataset Uniform(std::uint8_t value, std::size_t count) {
    RawDataset raw;
    raw.rows = 28;
    raw.cols = 28;
    raw.pixels.assign(count * 28 * 28, value);
    raw.labels.assign(count, 3);
    return raw;
}

EncodedDataset Numbered(std::size_t n) {
    EncodedDataset data{1, 2, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        data.features.push_back(static_cast<double>(i) / static_cast<double>(n));
        data.labels.push_back(i % 2);
    }
    return data;
}

std::multiset<double> Rows(const EncodedDataset &d) {
    return {d.features.begin(), d.features.end()};
}

fs::path MnistDir() {
    const char *env = std::getenv("QFL_DATA_DIR");
    return env ? fs::path(env) : fs::path();
}

bool HaveMnist() {
    const auto dir = MnistDir();
    return !dir.empty() && fs::exists(dir / "train-images-idx3-ubyte") &&
           fs::exists(dir / "t10k-labels-idx1-ubyte");
}

TEST(LoadIdx, ReadsWellFormedFiles) {
    TempDir dir;
    auto images = ImageFile(3, 2, 2, 0);
    images[16 + 5] = 200;
    WriteBytes(dir.path() / "img", images);
    WriteBytes(dir.path() / "lbl", LabelFile({7, 1, 9}));
    const auto raw = load_idx(dir.path() / "img", dir.path() / "lbl");
    EXPECT_EQ(raw.size(), 3u);
    EXPECT_EQ(raw.rows, 2u);
    EXPECT_EQ(raw.image(1)[1], 200);
    EXPECT_EQ(raw.labels, (std::vector<std::uint8_t>{7, 1, 9}));
}

TEST(LoadIdx, TruncatedFile) {
    TempDir dir;
    auto images = ImageFile(3, 2, 2, 0);
    images.pop_back();
    WriteBytes(dir.path() / "img", images);
    WriteBytes(dir.path() / "lbl", LabelFile({1, 2, 3}));
    try {
        load_idx(dir.path() / "img", dir.path() / "lbl");
        FAIL() << "expected a format error";
    } catch (const FormatError &e) {
        EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
    }
    WriteBytes(dir.path() / "short", {0, 0, 8});
    EXPECT_THROW(load_idx(dir.path() / "short", dir.path() / "lbl"), FormatError);
}

TEST(LoadIdx, MismatchedCounts) {
    TempDir dir;
    WriteBytes(dir.path() / "img", ImageFile(3, 2, 2, 0));
    WriteBytes(dir.path() / "lbl", LabelFile({1, 2}));
    EXPECT_THROW(load_idx(dir.path() / "img", dir.path() / "lbl"), FormatError);
}

TEST(LoadIdx, BadMagicAndLabels) {
    TempDir dir;
    WriteBytes(dir.path() / "img", ImageFile(2, 2, 2, 0, 0x801));
    WriteBytes(dir.path() / "lbl", LabelFile({1, 2}));
    EXPECT_THROW(load_idx(dir.path() / "img", dir.path() / "lbl"), FormatError);
    WriteBytes(dir.path() / "img", ImageFile(2, 2, 2, 0));
    WriteBytes(dir.path() / "lbl", LabelFile({1, 12}));
    EXPECT_THROW(load_idx(dir.path() / "img", dir.path() / "lbl"), FormatError);
    EXPECT_THROW(load_idx(dir.path() / "missing", dir.path() / "lbl"), FormatError);
}

TEST(SelectDigits, KeepsOrderAndRemapsAscending) {
    RawDataset raw = Uniform(0, 6);
    raw.labels = {7, 2, 5, 7, 1, 2};
    for (std::size_t i = 0; i < 6; ++i) {
        raw.pixels[i * 784] = static_cast<std::uint8_t>(i);
    }
    const auto sel = select_digits(raw, {7, 2});
    EXPECT_EQ(sel.labels, (std::vector<std::uint8_t>{1, 0, 1, 0}));
    EXPECT_EQ(sel.class_digits, (std::vector<int>{2, 7}));
    EXPECT_EQ(sel.image(1)[0], 1);
    EXPECT_EQ(sel.image(3)[0], 5);
}

TEST(SelectDigits, Errors) {
    RawDataset raw = Uniform(0, 3);
    EXPECT_THROW(select_digits(raw, {4, 5}), ConfigError);
    EXPECT_THROW(select_digits(raw, {3, 3}), ConfigError);
    EXPECT_THROW(select_digits(raw, {3}), ConfigError);
    EXPECT_THROW(select_digits(raw, {1, 2, 3, 4}), ConfigError);
}

TEST(ReduceFeatures, ConstantImages) {
    for (const std::size_t u : {4u, 8u, 16u}) {
        const auto zeros = reduce_features(Uniform(0, 2), u, ReductionMethod::AvgPool);
        const auto ones = reduce_features(Uniform(255, 2), u, ReductionMethod::AvgPool);
        EXPECT_EQ(zeros.features, std::vector<double>(2 * u, 0.0));
        EXPECT_EQ(ones.features, std::vector<double>(2 * u, 1.0));
    }
    EXPECT_THROW(reduce_features(Uniform(0, 2), 6, ReductionMethod::AvgPool),
                 ConfigError);
}

TEST(ReduceFeatures, AvgPoolGridOrder) {
    // Light only the block in grid row 1, column 2 of the 2 x 4 grid.
    RawDataset raw = Uniform(0, 1);
    for (std::size_t r = 14; r < 28; ++r) {
        for (std::size_t c = 14; c < 21; ++c) {
            raw.pixels[r * 28 + c] = 255;
        }
    }
    const auto enc = reduce_features(raw, 8, ReductionMethod::AvgPool);
    std::vector<double> expected(8, 0.0);
    expected[4 + 2] = 1.0;
    EXPECT_EQ(enc.features, expected);
    EXPECT_EQ(avgpool_grid(4), (std::pair<std::size_t, std::size_t>{2, 2}));
    EXPECT_EQ(avgpool_grid(16), (std::pair<std::size_t, std::size_t>{4, 4}));
}

TEST(ReduceFeatures, PcaFitsOnTrainAndClampsTest) {
    RawDataset train = Uniform(0, 40);
    std::uint64_t state = 12345;
    for (auto &p : train.pixels) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        p = static_cast<std::uint8_t>(state >> 56);
    }
    const auto reducer = FeatureReducer::fit(train, 4, ReductionMethod::Pca);
    const auto enc = reducer.apply(train);
    for (std::size_t j = 0; j < 4; ++j) {
        double lo = 1.0;
        double hi = 0.0;
        for (std::size_t n = 0; n < enc.size(); ++n) {
            lo = std::min(lo, enc.row(n)[j]);
            hi = std::max(hi, enc.row(n)[j]);
        }
        EXPECT_NEAR(lo, 0.0, 1e-12);
        EXPECT_NEAR(hi, 1.0, 1e-12);
    }
    const auto extreme = reducer.apply(Uniform(255, 3));
    for (const double f : extreme.features) {
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
}

TEST(Shard, EqualSplit) {
    const auto shards = shard(Numbered(12), 6, 1);
    ASSERT_EQ(shards.size(), 6u);
    for (const auto &s : shards) {
        EXPECT_EQ(s.size(), 2u);
    }
}

TEST(Shard, RemainderRule) {
    const auto shards = shard(Numbered(13), 6, 1);
    std::vector<std::size_t> sizes;
    for (const auto &s : shards) {
        sizes.push_back(s.size());
    }
    EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2, 2}));
}

TEST(Shard, DeterministicPartition) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = Numbered(37 + seed);
        const std::size_t k = 1 + seed % 7;
        const auto a = shard(data, k, seed);
        EXPECT_EQ(a, shard(data, k, seed));
        std::multiset<double> united;
        std::size_t total = 0;
        for (const auto &s : a) {
            const auto rows = Rows(s);
            united.insert(rows.begin(), rows.end());
            total += s.size();
        }
        EXPECT_EQ(total, data.size());
        EXPECT_EQ(united, Rows(data));
    }
    EXPECT_NE(shard(Numbered(30), 3, 1), shard(Numbered(30), 3, 2));
}

TEST(Shard, TooManyParticipants) {
    EXPECT_THROW(shard(Numbered(3), 4, 0), ConfigError);
    EXPECT_THROW(shard(Numbered(3), 0, 0), ConfigError);
}

TEST(Subsample, DeterministicSubset) {
    const auto data = Numbered(50);
    const auto a = subsample(data, 10, 5);
    EXPECT_EQ(a.size(), 10u);
    EXPECT_EQ(a, subsample(data, 10, 5));
    EXPECT_EQ(subsample(data, 0, 5), data);
}

TEST(SyntheticDataset, LabelsFollowLeadingFeature) {
    const auto data = synthetic_dataset(3, 3, 200, 9);
    for (std::size_t n = 0; n < data.size(); ++n) {
        EXPECT_EQ(data.labels[n], static_cast<std::size_t>(data.row(n)[0] * 3));
        for (const double f : data.row(n)) {
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0);
        }
    }
}

TEST(EncodedCache, RoundTrip) {
    TempDir dir;
    const auto data = synthetic_dataset(4, 3, 25, 1);
    write_encoded_cache(dir.path() / "cache.bin", data);
    EXPECT_EQ(fs::file_size(dir.path() / "cache.bin"), 24u + 25u * 4u * 8u + 25u);
    EXPECT_EQ(read_encoded_cache(dir.path() / "cache.bin"), data);
}

TEST(EncodedCache, RejectsTruncation) {
    TempDir dir;
    write_encoded_cache(dir.path() / "cache.bin", synthetic_dataset(2, 2, 5, 1));
    fs::resize_file(dir.path() / "cache.bin", 40);
    EXPECT_THROW(read_encoded_cache(dir.path() / "cache.bin"), FormatError);
}

TEST(Mnist, DigitCounts) {
    if (!HaveMnist()) {
        GTEST_SKIP() << "MNIST not available";
    }
    const auto dir = MnistDir();
    const auto train =
        load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    const auto test =
        load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
    EXPECT_EQ(train.size(), 60000u);
    EXPECT_EQ(select_digits(train, {2, 5}).size(), 11379u);
    EXPECT_EQ(select_digits(test, {2, 5}).size(), 1924u);
    EXPECT_EQ(select_digits(train, {1, 3, 7}).size(), 19138u);
    EXPECT_EQ(select_digits(test, {1, 3, 7}).size(), 3173u);
}

TEST(Mnist, FirstBinarySampleBlockMeans) {
    if (!HaveMnist()) {
        GTEST_SKIP() << "MNIST not available";
    }
    const auto dir = MnistDir();
    // Locate the first 2 or 5 by scanning the raw files directly.
    std::ifstream labels(dir / "train-labels-idx1-ubyte", std::ios::binary);
    std::ifstream images(dir / "train-images-idx3-ubyte", std::ios::binary);
    labels.seekg(8);
    std::size_t index = 0;
    for (char c; labels.get(c); ++index) {
        if (c == 2 || c == 5) {
            break;
        }
    }
    std::vector<unsigned char> img(784);
    images.seekg(16 + static_cast<std::streamoff>(index * 784));
    images.read(reinterpret_cast<char *>(img.data()), 784);
    std::vector<double> expected;
    for (int br = 0; br < 2; ++br) {
        for (int bc = 0; bc < 4; ++bc) {
            double sum = 0.0;
            for (int r = 0; r < 14; ++r) {
                for (int c = 0; c < 7; ++c) {
                    sum += img[static_cast<std::size_t>((br * 14 + r) * 28 + bc * 7 + c)];
                }
            }
            expected.push_back(sum / (14.0 * 7.0) / 255.0);
        }
    }
    const auto selected =
        select_digits(load_idx(dir / "train-images-idx3-ubyte",
                               dir / "train-labels-idx1-ubyte"),
                      {2, 5});
    const auto enc = reduce_features(selected, 8, ReductionMethod::AvgPool);
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_NEAR(enc.row(0)[j], expected[j], 1e-15);
    }
    for (const double f : enc.features) {
        ASSERT_GE(f, 0.0);
        ASSERT_LE(f, 1.0);
    }
}

} // namespace
} // namespace qfl
