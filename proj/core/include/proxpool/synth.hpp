#pragma once

#include "proxpool/graph.hpp"

#include <cstdint>

namespace proxpool {

/// Two-class toy task.  Even-indexed graphs (class 0) are a single
/// Erdos-Renyi graph on 20 nodes with p = 0.3; odd-indexed graphs (class 1)
/// are two p = 0.5 communities of 10 nodes joined by one bridge edge.  Any
/// disconnected piece is bridged to the rest.  Node features are one-hot
/// min(degree, 5).  Requires n_graphs >= 20.
Dataset synth_dataset(std::size_t n_graphs, std::uint64_t seed);

}  // namespace proxpool
