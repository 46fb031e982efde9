#pragma once

// POBS1 field files:
//
//   offset  size  content
//   0       5     "POBS1"
//   5       1     dim (1..3)
//   6       1     value encoding, 1 = little-endian IEEE-754 binary64
//   7       1     reserved, 0
//   8       24·N  per axis: f64 lo, f64 hi, u64 cells
//   …       8     u64 value count (= Π (cells+1))
//   …       8·n   values, row-major, last axis fastest
//
// All multi-byte quantities are little-endian regardless of the host.

#include <string>

#include "pobs/core.hpp"

namespace pobs {

std::string encode_field(const GridField& u);

/// Throws LoadError carrying the byte offset of the first inconsistency.
GridField decode_field(const std::string& bytes);

/// Throws IoError when the file cannot be written.
void save_field(const std::string& path, const GridField& u);

/// Throws LoadError (offset 0 when the file cannot be read).
GridField load_field(const std::string& path);

}  // namespace pobs
