#pragma once

/// @file snapshot.hpp
/// GridFunction snapshot format: CSV with header `theta,eta,v,value`, rows in
/// storage order (theta fastest), plus a JSON sidecar
/// `{n_theta,n_eta,n_v,origins,spacings,field_name}` at <path>.meta.json.

#include <string>

#include "gwd/grid.hpp"

namespace gwd {

/// Writes <path> (CSV) and <path minus .csv>.meta.json. Deterministic byte
/// output: values printed with %.17g.
void write_snapshot(const GridFunction& f, const std::string& field_name,
                    const std::string& csv_path);

struct Snapshot {
  GridFunction field;
  std::string field_name;
};

Snapshot read_snapshot(const std::string& csv_path);

}  // namespace gwd
