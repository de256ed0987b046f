#pragma once

#include <string>

#include "ratiotv/frequency_mask.hpp"
#include "ratiotv/radon.hpp"
#include "ratiotv/types.hpp"

namespace ratiotv {

// CSV image schema: header line "m,n", then m comma-separated rows.
void write_image_csv(const std::string& path, const ImageXd& img);
ImageXd read_image_csv(const std::string& path);

// Binary image schema: 8-byte magic "RTVIMG01", two little-endian int64 dims,
// then m*n float64 values in row-major order.
void write_image_binary(const std::string& path, const ImageXd& img);
ImageXd read_image_binary(const std::string& path);

// Reads by extension: ".csv" or anything else as binary.
ImageXd read_image(const std::string& path);

// Mask CSV: header "m,n", then 0/1 rows over the unshifted frequency grid.
void write_mask_csv(const std::string& path, const FrequencyMask& mask);
FrequencyMask read_mask_csv(const std::string& path);

// Sinogram CSV: header "n_detectors,n_angles", a line of angles in radians,
// then n_detectors rows of n_angles values.
void write_sinogram_csv(const std::string& path, const Sinogram& sino);
Sinogram read_sinogram_csv(const std::string& path);

}  // namespace ratiotv
