#pragma once

#include <iosfwd>
#include <string>

#include "imblab/dataset.hpp"

namespace imblab {

/// CSV layout: "# imblab csv v1 dataset" header, column names, then one row
/// of features followed by the integer label. Datasets with adjacency must
/// use the binary format. `comment` adds extra "# ..." lines (omitted when
/// empty), used by the CLI for suppressible timestamps.
void write_dataset_csv(std::ostream& os, const Dataset& ds, const std::string& comment = "");
Dataset read_dataset_csv(std::istream& is);

/// Compact binary layout: magic "IMBL", u32 version, u64 n, u64 d, u32 C,
/// u8 has_adjacency [, u64 edge count], then little-endian payload of f64
/// features, i32 labels and i32 edge pairs.
void write_dataset_binary(std::ostream& os, const Dataset& ds);
Dataset read_dataset_binary(std::istream& is);

void save_dataset(const std::string& path, const Dataset& ds, const std::string& comment = "");
Dataset load_dataset(const std::string& path);

}  // namespace imblab
