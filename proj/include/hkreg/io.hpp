#pragma once

#include <iosfwd>
#include <string>

#include "hkreg/manifold.hpp"
#include "hkreg/posterior.hpp"

namespace hkreg {

// Dataset CSV: header "t,coord1[,coord2[,coord3]]", one observation per row,
// coordinates intrinsic to the manifold (angle; unit vector; angle pair).
void write_dataset_csv(std::ostream& out, const Manifold& m, const Dataset& data);
Dataset read_dataset_csv(std::istream& in, const Manifold& m);

void save_dataset(const std::string& path, const Manifold& m, const Dataset& data);
Dataset load_dataset(const std::string& path, const Manifold& m);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace hkreg
