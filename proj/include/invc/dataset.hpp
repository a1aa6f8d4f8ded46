#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace invc {

inline constexpr std::size_t kSegmentLength = 1024;
inline constexpr std::size_t kMaxBatchSize = 98;

// One aligned training pair at the decimated rate (2756.25 Hz). Stored as
// float32, matching the on-disk format exactly so save/load is bit-exact.
struct SegmentPair {
    std::vector<float> audio;   // dimensionless, length 1024
    std::vector<float> gesture; // meters, length 1024
};

enum class Split { Train, Val, Test };

const char* split_name(Split split);

struct Dataset {
    std::vector<SegmentPair> segments; // ordered train..., val..., test...
    std::uint32_t train_count = 0;
    std::uint32_t val_count = 0;
    std::uint32_t test_count = 0;
    std::uint64_t shuffle_seed = 0;
    std::string preset;
    std::uint32_t rate_numerator = 44100;
    std::uint32_t rate_denominator = 16;

    std::size_t split_offset(Split split) const;
    std::size_t split_size(Split split) const;
    const SegmentPair& segment(Split split, std::size_t i) const;
};

// Cuts aligned decimated signals into non-overlapping 1024-sample windows
// (trailing remainder dropped), shuffles the window order by seed, then
// splits 80/10/10 with |val| = |test| = round(10%). Throws TooShort when any
// split would be empty.
Dataset segment_and_split(const std::vector<double>& audio, const std::vector<double>& gesture,
                          std::uint64_t seed, const std::string& preset);

// On-disk format, little-endian:
//   "INVC" | version u32=1 | rate num u32 | rate den u32 | seg len u32 |
//   seg count u32 | shuffle seed u64 | preset (u16 len + UTF-8) |
//   train/val/test counts u32 | per segment: 1024 f32 audio, 1024 f32 gesture
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

struct Batch {
    // indices into the dataset's segment list
    std::vector<std::size_t> segment_indices;
};

// Every segment of the split exactly once, reshuffled from epoch_seed,
// chunked into batches of at most batch_size.
std::vector<Batch> batches(const Dataset& d, Split split, std::uint64_t epoch_seed,
                           std::size_t batch_size);

} // namespace invc
