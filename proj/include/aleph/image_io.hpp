#pragma once

#include <string>

#include "aleph/image.hpp"

namespace aleph {

// Reads PPM (P6, 8-bit, gamma 2.2 decoded to linear) or PFM (32-bit float,
// passed through untouched). Format is detected from the magic bytes.
ImageBuffer load_frame(const std::string& path);

// Raw float dump, scale -1 (little-endian), rows bottom to top per the PFM
// convention. Round-trips bit-exactly through load_frame.
void save_pfm(const ImageBuffer& img, const std::string& path);

// 8-bit visualization: values clamped to [0,1], encoded with gamma 1/2.2.
void save_ppm(const ImageBuffer& img, const std::string& path);

// Dispatches on extension: .pfm or .ppm.
void save_frame(const ImageBuffer& img, const std::string& path);

}  // namespace aleph
