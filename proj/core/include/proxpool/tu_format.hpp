#pragma once

#include "proxpool/graph.hpp"

#include <filesystem>
#include <string>

namespace proxpool {

/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt`, `<name>_graph_labels.txt`
/// and `<name>_node_labels.txt` from `directory`.
///
/// Node ids are 1-based.  Edges are symmetrized with unit weight; a pair listed
/// in one direction only is repaired and counted in `Dataset::load_summary`.
/// Node labels become one-hot rows over the union of labels in the collection
/// and graph labels are remapped to contiguous class indices by sorted value.
Dataset load_tu_dataset(const std::filesystem::path& directory, const std::string& name);

/// Writes `ds` in the same layout.  Node labels are the argmax column of each
/// feature row; graph labels are written as stored class indices.
void write_tu_dataset(const Dataset& ds, const std::filesystem::path& directory,
                      const std::string& name);

}  // namespace proxpool
