#ifndef STYLECODEC_IMAGE_HPP_
#define STYLECODEC_IMAGE_HPP_

#include <string>

#include "stylecodec/tensor.hpp"

namespace stylecodec {

/// Checks the image contract: 3 channels, square, side a positive multiple
/// of 8, every value finite and inside [0, 1]. Throws ValidationError.
void validate_image(const Tensor& img);

/// True iff `img` satisfies validate_image.
bool is_valid_image(const Tensor& img);

/// Writes `img` as a binary PPM (P6, 8 bits per channel). Values are stored
/// as round(v * 255); two calls with the same tensor produce byte-identical
/// files.
void save_image(const Tensor& img, const std::string& path);

/// Reads a binary PPM written by save_image back into a [0,1] tensor.
Tensor load_image(const std::string& path);

/// Quantization applied by one save/load round trip: round(v*255)/255.
double quantize_8bit(double v);

}  // namespace stylecodec

#endif  // STYLECODEC_IMAGE_HPP_
