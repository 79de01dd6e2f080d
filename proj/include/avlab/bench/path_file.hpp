#pragma once

#include <string>

#include "avlab/common/ensemble.hpp"

namespace avlab {

/// Little-endian path file, schema version 1:
///
///   offset  size        field
///   0       4           magic "AVLP"
///   4       4   u32     schema version
///   8       4   u32     PathKind
///   12      8   u64     number of times K
///   20      8   u64     number of paths P
///   28      8K  f64     observation times
///   then P records of 1 + 20K bytes:
///           1   u8      flag (0 = clean, else 1 + ErrorKind)
///           4K  i32     labels
///           8K  f64     c1
///           8K  f64     c2
inline constexpr std::uint32_t kPathSchemaVersion = 1;

std::string encode_paths(const Ensemble& ens);
Ensemble decode_paths(const std::string& bytes);

void write_paths(const std::string& file, const Ensemble& ens);
Ensemble read_paths(const std::string& file);

/// One row per clean path and time: time,path,label,c1,c2.
std::string marginals_csv(const Ensemble& ens);

/// Same kind, times, flags and bitwise-equal records.
bool identical(const Ensemble& a, const Ensemble& b);

}  // namespace avlab
