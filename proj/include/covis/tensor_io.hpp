#pragma once

#include "covis/tensor.hpp"

#include <string>

namespace covis {

// Fixture format, little-endian:
//   magic "CVSF" | version u8 = 1 | dtype u8 = 0 (f32) | ndim u8
//   | ndim x u32 extents | row-major f32 payload
void write_tensor(const std::string& path, const Tensor& t);
Tensor read_tensor(const std::string& path);

}  // namespace covis
