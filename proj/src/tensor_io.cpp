#include "covis/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace covis {

namespace {

constexpr char kMagic[4] = {'C', 'V', 'S', 'F'};

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
    buf.push_back(static_cast<unsigned char>(v & 0xff));
    buf.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    buf.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    buf.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_tensor(const std::string& path, const Tensor& t) {
    t.validate();
    std::vector<unsigned char> buf;
    buf.reserve(7 + 4 * t.dims.size() + 4 * t.data.size());
    buf.insert(buf.end(), kMagic, kMagic + 4);
    buf.push_back(1);  // version
    buf.push_back(0);  // dtype f32
    buf.push_back(static_cast<unsigned char>(t.ndim()));
    for (int d : t.dims) put_u32(buf, static_cast<std::uint32_t>(d));
    for (float v : t.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(buf, bits);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("short write: " + path);
}

Tensor read_tensor(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 7) throw std::runtime_error("truncated tensor file: " + path);
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw std::runtime_error("bad magic in tensor file: " + path);
    if (buf[4] != 1) throw std::runtime_error("unsupported tensor file version: " + path);
    if (buf[5] != 0) throw std::runtime_error("tensor dtype must be f32: " + path);
    const int ndim = buf[6];
    if (ndim < 1 || ndim > 4) throw std::runtime_error("tensor ndim out of range: " + path);
    std::size_t off = 7;
    if (buf.size() < off + 4 * static_cast<std::size_t>(ndim))
        throw std::runtime_error("truncated tensor header: " + path);

    Tensor t;
    std::int64_t n = 1;
    for (int i = 0; i < ndim; ++i) {
        const std::uint32_t e = get_u32(buf.data() + off);
        off += 4;
        t.dims.push_back(static_cast<int>(e));
        n *= e;
    }
    if (buf.size() != off + 4 * static_cast<std::size_t>(n))
        throw std::runtime_error("tensor payload length mismatch: " + path);
    t.data.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint32_t bits = get_u32(buf.data() + off);
        off += 4;
        std::memcpy(&t.data[i], &bits, 4);
    }
    return t;
}

}  // namespace covis
