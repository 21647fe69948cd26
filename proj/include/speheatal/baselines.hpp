#ifndef SPEHEATAL_BASELINES_HPP
#define SPEHEATAL_BASELINES_HPP

#include <vector>

#include "speheatal/con2dis.hpp"
#include "speheatal/raster.hpp"

namespace speheatal {

enum class Linkage { Single, Average };

/// Lloyd's k-means on raw pixel coordinates.
std::vector<int> kmeans_pixels(const std::vector<PixelPoint>& pts, int k, unsigned seed);

/// Bottom-up agglomerative clustering to k clusters.
std::vector<int> ahc(const std::vector<PixelPoint>& pts, int k, Linkage linkage);

/// Spectral clustering with a distance-only Gaussian affinity on the kNN
/// graph (conformity and connectivity forced to 1); sigma <= 0 selects the
/// median kNN distance.
std::vector<int> spectral_distance_only(const std::vector<PixelPoint>& pts, int k,
                                        double sigma, const Con2DisConfig& cfg);

}  // namespace speheatal

#endif
