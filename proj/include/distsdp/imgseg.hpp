#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "distsdp/async_engine.hpp"
#include "distsdp/oracles.hpp"
#include "distsdp/partition.hpp"
#include "distsdp/problem.hpp"
#include "distsdp/schedule.hpp"

namespace distsdp {

// Row-major RGB image; pixel (r, c) is node r * width + c.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> rgb;

  const std::array<std::uint8_t, 3>& at(int r, int c) const { return rgb[r * width + c]; }
};

// P3 or P6 with maxval 255.
Image parse_ppm(const std::string& bytes);
Image load_image(const std::string& path);
std::string encode_ppm(const Image& img, bool binary);

double rgb_distance(const std::array<std::uint8_t, 3>& a, const std::array<std::uint8_t, 3>& b);

// 4-neighbour weights: d if d > threshold, else no entry.
CoefficientMatrix build_weights(const Image& img, double threshold);

// 1-based first row of each strip, m + 1 values; strip k covers rows
// [bounds[k], bounds[k + 1]] so neighbouring strips share one row.
std::vector<int> strip_bounds(int height, int m_agents);

// Horizontal strips with a one-row overlap; every edge goes to the lowest
// strip holding both endpoints. Throws TooManyAgents when m exceeds the height.
Problem strip_problem(const Image& img, const CoefficientMatrix& M, int m_agents);
AgentPartition strip_partition(const Image& img, const CoefficientMatrix& M, int m_agents);

// Flips whole positive-weight components (which leaves the cut unchanged) so
// that similar neighbours agree, then makes pixel (0, 0) positive.
Signs align_labels(const Image& img, const CoefficientMatrix& M, double threshold,
                   const Signs& signs);

struct SegmentOptions {
  double threshold = 100.0;
  int agents = 4;
  int B = 3;
  ScheduleMode mode = ScheduleMode::UniformRandom;
  std::uint64_t seed = 0;
  double sigma = 0.5;
  double tol = 1e-7;
  long max_iters = 100000;
  int trials = 200;
  bool align = true;
};

struct Segmentation {
  std::vector<std::uint8_t> mask;  // 0 for the class of pixel (0, 0), 255 otherwise
  Signs signs;
  double cut = 0.0;
  Problem problem;
  AsyncResult solve;
};

Segmentation segment(const Image& img, const SegmentOptions& opts);

// Plain-text PGM with maxval 255.
std::string encode_pgm(int width, int height, const std::vector<std::uint8_t>& pixels);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace distsdp
