#include "mixgan/data/dataset.hpp"

#include "mixgan/data/idx.hpp"
#include "mixgan/data/image_ops.hpp"
#include "mixgan/data/synthetic.hpp"

namespace mixgan::data {

const char* to_string(DataSource s) {
  switch (s) {
    case DataSource::idx: return "idx";
    case DataSource::image_dir: return "image_dir";
    case DataSource::synthetic_shapes: return "synthetic_shapes";
    case DataSource::synthetic_styled: return "synthetic_styled";
  }
  return "?";
}

DataSource parse_source(const std::string& name) {
  if (name == "idx") return DataSource::idx;
  if (name == "image_dir") return DataSource::image_dir;
  if (name == "synthetic_shapes") return DataSource::synthetic_shapes;
  if (name == "synthetic_styled") return DataSource::synthetic_styled;
  throw ArgumentError("unknown data source '" + name +
                      "' (expected idx, image_dir, synthetic_shapes or "
                      "synthetic_styled)");
}

namespace {

void validate(const DatasetSpec& spec) {
  if (spec.image_size == 0)
    throw ArgumentError("dataset: image_size must be positive");
  const bool synthetic = spec.source == DataSource::synthetic_shapes ||
                         spec.source == DataSource::synthetic_styled;
  if (synthetic) {
    if (spec.count == 0)
      throw ArgumentError("dataset: synthetic sources need count > 0");
  } else if (spec.path.empty()) {
    throw ArgumentError(std::string("dataset: source ") +
                        to_string(spec.source) + " needs a path");
  }
}

// Retags and converts an already-square batch to the requested channel
// count and size.
ImageBatch conform(ImageBatch batch, const DatasetSpec& spec) {
  if (spec.grayscale && batch.channels() == 3) batch = to_grayscale(batch);
  if (!spec.grayscale && batch.channels() == 1)
    batch = replicate_channels(batch);
  if (batch.height() != spec.image_size)
    batch = resize_bilinear(batch, spec.image_size);
  batch.tag = spec.tag;
  return batch;
}

}  // namespace

ResolvedDataset resolve_dataset(const DatasetSpec& spec) {
  validate(spec);
  ResolvedDataset out;
  switch (spec.source) {
    case DataSource::idx:
      out.batch = conform(load_idx(spec.path, spec.tag), spec);
      break;
    case DataSource::image_dir: {
      DirLoadResult r = load_image_dir(spec.path, spec.image_size,
                                       spec.grayscale, spec.tag);
      out.batch = std::move(r.batch);
      out.skipped = std::move(r.skipped);
      break;
    }
    case DataSource::synthetic_shapes: {
      ShapeCorpus c = make_shape_corpus(spec.seed, spec.count,
                                        spec.image_size);
      out.batch = conform(std::move(c.batch), spec);
      out.labels = std::move(c.labels);
      break;
    }
    case DataSource::synthetic_styled: {
      StyleCorpus c = make_style_corpus(spec.seed, spec.count,
                                        spec.image_size);
      out.batch = conform(std::move(c.batch), spec);
      out.labels = std::move(c.pattern_labels);
      break;
    }
  }
  return out;
}

}  // namespace mixgan::data
