#ifndef OT_IO_HPP
#define OT_IO_HPP

#include <string>

#include "ot/core.hpp"
#include "ot/datasets.hpp"

namespace ot {

// Two interchangeable on-disk instance encodings, both whitespace-separated
// text (exact grammars in the README):
//
// dense:            n m
//                   s_1 ... s_n
//                   d_1 ... d_m
//                   n rows of m integer costs
//
// point-cloud:      POINTS d
//                   n m scale
//                   n lines "weight c_1 ... c_d"   (supply cloud)
//                   m lines "weight c_1 ... c_d"   (demand cloud)
//
// The point-cloud form materializes costs on load as
// round(scale * euclidean distance).

// Dispatches on the first token. The instance name is the file stem.
OTInstance load_instance(const std::string& path);

void save_instance_dense(const OTInstance& inst, const std::string& path);

void save_instance_points(const PointCloudDistribution& supply,
                          const PointCloudDistribution& demand, double scale,
                          const std::string& path);

}  // namespace ot

#endif
