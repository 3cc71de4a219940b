#include "covis/digest.hpp"

#include <cstring>
#include <stdexcept>

namespace covis {

namespace {

constexpr char kMagic[4] = {'C', 'V', 'D', 'G'};

void put_u16(std::vector<std::uint8_t>& buf, std::uint16_t v) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xff));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Digest build_digest(const Tensor& fmap, const std::set<int>& channels,
                    DigestKind kind, float tau, std::uint16_t source_node,
                    std::uint32_t frame_id, std::uint8_t layer_index) {
    if (fmap.ndim() != 3) throw std::invalid_argument("build_digest expects [C,H,W]");
    if (channels.empty()) throw std::invalid_argument("build_digest: empty channel set");
    for (int c : channels)
        if (c < 0 || c >= fmap.channels())
            throw std::invalid_argument("build_digest: channel out of range");

    const int h = fmap.height(), w = fmap.width();
    Mat2f s = Mat2f::Zero(h, w);
    for (int c : channels) s += fmap.channel(c);
    s /= static_cast<float>(channels.size());

    Digest d;
    d.kind = kind;
    d.source_node = source_node;
    d.frame_id = frame_id;
    d.layer_index = layer_index;
    if (kind == DigestKind::C_a) {
        d.payload = s;
    } else {
        const float m = s.maxCoeff();
        d.payload = Mat2f::Zero(h, w);
        if (m > 0.0f) {
            const float cut = tau * m;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    d.payload(y, x) = s(y, x) >= cut ? 1.0f : 0.0f;
        }
    }
    return d;
}

std::size_t encoded_digest_size(DigestKind kind, int height, int width) {
    const std::size_t header = 16;
    if (kind == DigestKind::C_a)
        return header + 4u * static_cast<std::size_t>(height) * width;
    return header + static_cast<std::size_t>(height) * ((width + 7) / 8);
}

std::vector<std::uint8_t> encode_digest(const Digest& d) {
    const int h = d.height(), w = d.width();
    if (h < 1 || w < 1) throw std::invalid_argument("encode_digest: empty payload");
    std::vector<std::uint8_t> buf;
    buf.reserve(encoded_digest_size(d.kind, h, w));
    buf.insert(buf.end(), kMagic, kMagic + 4);
    buf.push_back(static_cast<std::uint8_t>(d.kind));
    buf.push_back(d.layer_index);
    put_u16(buf, d.source_node);
    put_u32(buf, d.frame_id);
    put_u16(buf, static_cast<std::uint16_t>(h));
    put_u16(buf, static_cast<std::uint16_t>(w));

    if (d.kind == DigestKind::C_a) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                std::uint32_t bits;
                const float v = d.payload(y, x);
                std::memcpy(&bits, &v, 4);
                put_u32(buf, bits);
            }
    } else {
        const int row_bytes = (w + 7) / 8;
        for (int y = 0; y < h; ++y) {
            std::size_t row_off = buf.size();
            buf.insert(buf.end(), static_cast<std::size_t>(row_bytes), 0);
            for (int x = 0; x < w; ++x)
                if (d.payload(y, x) != 0.0f)
                    buf[row_off + x / 8] |= static_cast<std::uint8_t>(1u << (x % 8));
        }
    }
    return buf;
}

Digest decode_digest(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) throw std::runtime_error("digest too short");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("bad digest magic");
    const std::uint8_t kind_byte = bytes[4];
    if (kind_byte != 1 && kind_byte != 2) throw std::runtime_error("bad digest kind byte");

    Digest d;
    d.kind = static_cast<DigestKind>(kind_byte);
    d.layer_index = bytes[5];
    d.source_node = get_u16(bytes.data() + 6);
    d.frame_id = get_u32(bytes.data() + 8);
    const int h = get_u16(bytes.data() + 12);
    const int w = get_u16(bytes.data() + 14);
    if (h < 1 || w < 1) throw std::runtime_error("bad digest extents");
    if (bytes.size() != encoded_digest_size(d.kind, h, w))
        throw std::runtime_error("digest payload length mismatch");

    d.payload = Mat2f::Zero(h, w);
    if (d.kind == DigestKind::C_a) {
        std::size_t off = 16;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::uint32_t bits = get_u32(bytes.data() + off);
                off += 4;
                std::memcpy(&d.payload(y, x), &bits, 4);
            }
    } else {
        const int row_bytes = (w + 7) / 8;
        for (int y = 0; y < h; ++y) {
            const std::uint8_t* row = bytes.data() + 16 + static_cast<std::size_t>(y) * row_bytes;
            for (int x = 0; x < w; ++x)
                d.payload(y, x) = (row[x / 8] >> (x % 8)) & 1 ? 1.0f : 0.0f;
            // Padding bits past column w-1 must be zero.
            for (int x = w; x < row_bytes * 8; ++x)
                if ((row[x / 8] >> (x % 8)) & 1)
                    throw std::runtime_error("digest mask has nonzero padding bits");
        }
    }
    return d;
}

}  // namespace covis
