#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ianmt/tensor.hpp"

namespace ianmt {

/// Named-parameter snapshot with ordered key=value metadata.
///
/// File layout: magic "IANMT1", u32 length-prefixed metadata block (UTF-8
/// key=value lines), then tensor records until EOF. Each record is
/// u32 name length, name bytes, u32 rank, u32 dims, then the payload as
/// little-endian 64-bit floats. Save->load->save is byte-identical.
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Tensor> tensors;  // each tensor carries its name

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  const Tensor* find(const std::string& name) const;
  std::string meta(const std::string& key, const std::string& fallback = "") const;
  void set_meta(const std::string& key, const std::string& value);
};

}  // namespace ianmt
