#ifndef SPEHEATAL_SPLICE_HPP
#define SPEHEATAL_SPLICE_HPP

#include <optional>
#include <vector>

#include "speheatal/raster.hpp"

namespace speheatal {

struct EndpointOwner {
    enum class Kind { HeadAxis, TailSkeleton };
    Kind kind = Kind::TailSkeleton;
    int id = 0;   // head index or tail cluster index
    int end = 0;  // which end (0/1, or running index for multi-tip skeletons)

    friend bool operator==(const EndpointOwner&, const EndpointOwner&) = default;
};

struct Endpoint {
    double x = 0, y = 0;
    double terminal_angle = 0;  // degrees in [0,180)
    EndpointOwner owner;
};

struct SpliceThresholds {
    double lambda1 = 30.0;  // px distance gate
    double lambda2 = 35.0;  // degrees angle gate
    int n_slope = 7;        // skeleton pixels used for the terminal angle fit
};

struct MatchedPair {
    int a = 0, b = 0;  // indices into the endpoint list
    double distance = 0;
    double angle_diff = 0;
};

struct SpermInstance {
    std::optional<int> head_idx;
    std::vector<int> tail_clusters;
    BinaryMask full_mask;
    std::vector<PixelPoint> skeleton_polyline;
};

/// Head-axis tips (center +- major_semiaxis along the orientation) and
/// degree-1 skeleton pixels, each with a locally fitted terminal angle.
/// Closed-loop skeletons contribute no endpoints.
std::vector<Endpoint> extract_endpoints(const std::vector<Ellipse>& heads,
                                        const std::vector<BinaryMask>& skeletons,
                                        const SpliceThresholds& th = {});

/// Acute difference of the two terminal angles, in [0, 90] degrees.
double angular_similarity(const Endpoint& a, const Endpoint& b);

/// Greedy matching over candidates passing both gates, best angle first
/// (distance, then owner order, break ties). Each endpoint joins at most
/// one pair; the two tips of one owner never pair with each other.
std::vector<MatchedPair> match_endpoints(const std::vector<Endpoint>& endpoints,
                                         const SpliceThresholds& th);

/// Union matched owners into instances, rasterizing a 1-px Bresenham bridge
/// per match. A match that would put two heads in one instance is dropped
/// (weakest first). Unmatched heads and tails become their own instances.
std::vector<SpermInstance> assemble(const std::vector<BinaryMask>& heads,
                                    const std::vector<BinaryMask>& tail_masks,
                                    const std::vector<BinaryMask>& skeletons,
                                    const std::vector<Endpoint>& endpoints,
                                    const std::vector<MatchedPair>& matches);

/// Bresenham line rasterization, inclusive of both ends.
std::vector<PixelPoint> bresenham_line(PixelPoint a, PixelPoint b);

}  // namespace speheatal

#endif
