#include "copreg/dataset.hpp"

#include "copreg/error.hpp"

namespace copreg {

Dataset Dataset::subset(std::span<const Eigen::Index> idx) const {
  Dataset out;
  out.binary = binary;
  out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  if (latent) out.latent = Eigen::VectorXd(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const Eigen::Index src = idx[r];
    if (src < 0 || src >= n()) throw ShapeError("subset index out of range");
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(src);
    out.y[static_cast<Eigen::Index>(r)] = y[src];
    if (latent) (*out.latent)[static_cast<Eigen::Index>(r)] = (*latent)[src];
  }
  return out;
}

}  // namespace copreg
