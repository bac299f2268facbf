#pragma once

#include <span>
#include <vector>

#include "had/rx.hpp"
#include "had/subspace.hpp"
#include "had/types.hpp"

namespace had::ref {

// Serial reference implementations of the OpenMP kernels. Each mirrors its
// parallel counterpart loop-for-loop so outputs must match bit for bit;
// tests assert the equality and the benchmark target compares throughput.

DataMatrix transform_cube(const HsiCube& cube, std::size_t grid_size,
                          double mass_weight = 1.0);

std::vector<double> scatter_matrix(const DataMatrix& data,
                                   std::span<const double> mean = {});

std::vector<double> gram_matrix(const DataMatrix& data,
                                std::span<const double> mean = {});

std::vector<double> subspace_scores(const DataMatrix& data,
                                    const BackgroundSubspace& model);

ScoreMap rx_score_cube(const HsiCube& cube, const RxModel& model);

}  // namespace had::ref
