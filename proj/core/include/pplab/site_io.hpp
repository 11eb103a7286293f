#pragma once

#include <iosfwd>
#include <string>

#include "pplab/geometry.hpp"

namespace pplab {

/// JSON site-set format:
///   {"dim": d, "sites": [{"id": 0, "x": 0.5, "y": 0.5, "attrs": [a1, ..., ad]}, ...]}
/// The loader validates all SiteSet invariants and rejects duplicates.
SiteSet load_site_set(std::istream& in);
SiteSet load_site_set(const std::string& path);

void save_site_set(const SiteSet& s, std::ostream& out);
void save_site_set(const SiteSet& s, const std::string& path);

}  // namespace pplab
