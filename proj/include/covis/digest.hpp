#pragma once

#include "covis/tensor.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace covis {

enum class DigestKind : std::uint8_t { C_a = 1, C_l = 2 };

// Compact per-frame scene summary shared between cameras: either the mean of
// the selected channels (C_a) or a binary location mask over it (C_l).
struct Digest {
    DigestKind kind = DigestKind::C_a;
    std::uint16_t source_node = 0;
    std::uint32_t frame_id = 0;
    std::uint8_t layer_index = 1;
    Mat2f payload;  // C_a: activations >= 0; C_l: exactly 0.0f / 1.0f

    int height() const { return static_cast<int>(payload.rows()); }
    int width() const { return static_cast<int>(payload.cols()); }
};

// S = element-wise mean over the selected channels. C_a carries S itself;
// C_l carries the mask of S >= tau * max(S) (all-zero S gives an all-zero
// mask).
Digest build_digest(const Tensor& fmap, const std::set<int>& channels,
                    DigestKind kind, float tau, std::uint16_t source_node,
                    std::uint32_t frame_id, std::uint8_t layer_index);

// Wire format, little-endian:
//   magic "CVDG" | kind u8 | layer_index u8 | source_node u16 | frame_id u32
//   | height u16 | width u16 | payload
// C_a payload: row-major f32. C_l payload: rows packed LSB-first, each row
// padded to a whole byte.
std::vector<std::uint8_t> encode_digest(const Digest& d);
Digest decode_digest(const std::vector<std::uint8_t>& bytes);

std::size_t encoded_digest_size(DigestKind kind, int height, int width);

}  // namespace covis
