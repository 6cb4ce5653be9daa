#ifndef GHOSTLAB_FFT_INTERNAL_HPP
#define GHOSTLAB_FFT_INTERNAL_HPP

#include <vector>

#include "ghostlab/grid.hpp"

namespace ghostlab::detail {

/// In-place unnormalized DFT in natural ordering (index 0 = zero
/// lag/frequency). v.size() must equal nx * ny; rows are y-major like the
/// grid classes. Shared plan cache with the centered transforms.
void fft_raw(std::vector<Complex>& v, int nx, int ny, bool forward);

}  // namespace ghostlab::detail

#endif
