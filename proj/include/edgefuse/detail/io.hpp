#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "edgefuse/errors.hpp"

namespace edgefuse::detail {

// Writes through a temp file + rename so readers never observe partial output
// and failed runs leave no half-written artifact behind.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace edgefuse::detail
