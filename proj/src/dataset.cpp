#include "invc/dataset.hpp"

#include "binio.hpp"
#include "invc/errors.hpp"
#include "invc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace invc {

namespace {

constexpr char kMagic[4] = {'I', 'N', 'V', 'C'};
constexpr std::uint32_t kVersion = 1;

} // namespace

const char* split_name(Split split) {
    switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    }
    return "?";
}

std::size_t Dataset::split_offset(Split split) const {
    switch (split) {
    case Split::Train: return 0;
    case Split::Val: return train_count;
    case Split::Test: return static_cast<std::size_t>(train_count) + val_count;
    }
    return 0;
}

std::size_t Dataset::split_size(Split split) const {
    switch (split) {
    case Split::Train: return train_count;
    case Split::Val: return val_count;
    case Split::Test: return test_count;
    }
    return 0;
}

const SegmentPair& Dataset::segment(Split split, std::size_t i) const {
    if (i >= split_size(split))
        throw IndexOutOfRange("segment index " + std::to_string(i) + " out of range for " +
                              split_name(split) + " split of size " +
                              std::to_string(split_size(split)));
    return segments[split_offset(split) + i];
}

Dataset segment_and_split(const std::vector<double>& audio, const std::vector<double>& gesture,
                          std::uint64_t seed, const std::string& preset) {
    if (audio.size() != gesture.size())
        throw ShapeMismatch("segment_and_split: audio and gesture lengths differ");

    const std::size_t count = audio.size() / kSegmentLength;
    const auto tenth = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(count)));
    if (count < 1 || tenth < 1 || count < 2 * tenth + 1)
        throw TooShort("segment_and_split: " + std::to_string(count) +
                       " segments cannot fill train/val/test (need at least 5)");

    const std::vector<std::size_t> order = shuffled_indices(count, seed);

    Dataset d;
    d.shuffle_seed = seed;
    d.preset = preset;
    d.val_count = static_cast<std::uint32_t>(tenth);
    d.test_count = static_cast<std::uint32_t>(tenth);
    d.train_count = static_cast<std::uint32_t>(count - 2 * tenth);
    d.segments.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t begin = order[i] * kSegmentLength;
        SegmentPair p;
        p.audio.resize(kSegmentLength);
        p.gesture.resize(kSegmentLength);
        for (std::size_t j = 0; j < kSegmentLength; ++j) {
            p.audio[j] = static_cast<float>(audio[begin + j]);
            p.gesture[j] = static_cast<float>(gesture[begin + j]);
        }
        d.segments.push_back(std::move(p));
    }
    return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
    using detail::put_f32;
    using detail::put_le;

    std::string out;
    out.append(kMagic, 4);
    put_le(out, kVersion);
    put_le(out, d.rate_numerator);
    put_le(out, d.rate_denominator);
    put_le(out, static_cast<std::uint32_t>(kSegmentLength));
    put_le(out, static_cast<std::uint32_t>(d.segments.size()));
    put_le(out, d.shuffle_seed);
    put_le(out, static_cast<std::uint16_t>(d.preset.size()));
    out += d.preset;
    put_le(out, d.train_count);
    put_le(out, d.val_count);
    put_le(out, d.test_count);
    for (const auto& seg : d.segments) {
        for (float v : seg.audio) put_f32(out, v);
        for (float v : seg.gesture) put_f32(out, v);
    }
    detail::write_file(path, out);
}

Dataset load_dataset(const std::string& path) {
    detail::Reader r(path, "dataset file");

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw BadMagic("dataset file has wrong magic");
    const auto version = r.le<std::uint32_t>();
    if (version != kVersion)
        throw BadVersion("dataset version " + std::to_string(version) + ", expected 1");

    Dataset d;
    d.rate_numerator = r.le<std::uint32_t>();
    d.rate_denominator = r.le<std::uint32_t>();
    const auto seg_len = r.le<std::uint32_t>();
    if (seg_len != kSegmentLength)
        throw BadVersion("unexpected segment length " + std::to_string(seg_len));
    const auto count = r.le<std::uint32_t>();
    d.shuffle_seed = r.le<std::uint64_t>();
    const auto name_len = r.le<std::uint16_t>();
    d.preset.resize(name_len);
    if (name_len) r.bytes(d.preset.data(), name_len);
    d.train_count = r.le<std::uint32_t>();
    d.val_count = r.le<std::uint32_t>();
    d.test_count = r.le<std::uint32_t>();
    if (static_cast<std::uint64_t>(d.train_count) + d.val_count + d.test_count != count)
        throw TruncatedFile("split counts do not cover the segment count");

    d.segments.resize(count);
    for (auto& seg : d.segments) {
        seg.audio.resize(kSegmentLength);
        seg.gesture.resize(kSegmentLength);
        for (auto& v : seg.audio) v = r.f32();
        for (auto& v : seg.gesture) v = r.f32();
    }
    return d;
}

std::vector<Batch> batches(const Dataset& d, Split split, std::uint64_t epoch_seed,
                           std::size_t batch_size) {
    const std::size_t n = d.split_size(split);
    if (n == 0) throw TooShort(std::string("batches: empty ") + split_name(split) + " split");
    if (batch_size < 1 || batch_size > kMaxBatchSize)
        throw IndexOutOfRange("batch size must be in [1, 98], got " + std::to_string(batch_size));

    const std::size_t offset = d.split_offset(split);
    const std::vector<std::size_t> order = shuffled_indices(n, epoch_seed);

    std::vector<Batch> out;
    out.reserve((n + batch_size - 1) / batch_size);
    for (std::size_t begin = 0; begin < n; begin += batch_size) {
        Batch b;
        const std::size_t end = std::min(begin + batch_size, n);
        b.segment_indices.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) b.segment_indices.push_back(offset + order[i]);
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace invc
