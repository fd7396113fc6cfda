#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "dknn/core.hpp"
#include "dknn/rng.hpp"

namespace dknn {

/// CSV dataset format: header `id,label,c0,...,c{d-1}`, one point per row,
/// integers only, empty label field for unlabeled points.
void write_dataset(std::ostream& out, const Dataset& ds);
void write_dataset_file(const std::string& path, const Dataset& ds);

Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

enum class Distribution { Uniform, Clustered, Geometric };

Distribution distribution_from_string(const std::string& s);

/// Deterministic dataset generator. Ids are (origin machine << 32) | local
/// index with round-robin origin over k. Coordinates stay within
/// [0, 2^30). labels > 0 attaches a class tag in [0, labels) to every point.
Dataset generate_dataset(std::uint64_t n, std::size_t d, int k,
                         std::uint64_t seed, Distribution dist,
                         std::uint64_t labels = 0);

/// Deterministic query point for trial `trial`: uniform coordinates in the
/// generator's range.
Point random_query(std::size_t d, std::uint64_t seed, std::uint64_t trial);

}  // namespace dknn
