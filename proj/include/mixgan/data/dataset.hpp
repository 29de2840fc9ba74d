#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixgan/data/image_batch.hpp"

namespace mixgan::data {

enum class DataSource { idx, image_dir, synthetic_shapes, synthetic_styled };

const char* to_string(DataSource s);
DataSource parse_source(const std::string& name);  // throws ArgumentError

// Where a domain's images come from. File sources need `path`; synthetic
// sources need `seed` and `count`. Every source is brought to
// (n, grayscale ? 1 : 3, image_size, image_size).
struct DatasetSpec {
  DataSource source = DataSource::synthetic_shapes;
  std::string path;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t image_size = 32;
  bool grayscale = true;
  DomainTag tag = DomainTag::content;
};

struct ResolvedDataset {
  ImageBatch batch;
  std::vector<std::uint8_t> labels;   // class ids when the source has them
  std::vector<std::string> skipped;   // undecodable files (image_dir only)
};

// Materializes the spec. Throws ArgumentError on an inconsistent spec and
// propagates loader errors (FormatError, IoError, EmptyDatasetError).
ResolvedDataset resolve_dataset(const DatasetSpec& spec);

}  // namespace mixgan::data
