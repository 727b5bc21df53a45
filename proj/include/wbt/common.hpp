// Copyright 2026 The wbtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WBT_COMMON_HPP_
#define WBT_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace wbt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
// One column per planar point.
using Points2 = Eigen::Matrix<double, 2, Eigen::Dynamic>;

// All stochastic code draws from this engine; seeds are always explicit.
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A required upstream artifact (checkpoint, clip set) is missing.
class DependencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf in training or optimization.
class NumericalDivergence : public Error {
 public:
  using Error::Error;
};

// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  using std::remainder;
  Scalar w = remainder(a, Scalar(2 * kPi));
  if (w <= Scalar(-kPi)) w += Scalar(2 * kPi);
  return w;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rot2(Scalar angle) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> r;
  r << cos(angle), -sin(angle), sin(angle), cos(angle);
  return r;
}

// 90 degree counter-clockwise rotation: omega x p for a planar angular
// velocity of 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 1> perp(
    const Eigen::MatrixBase<Derived>& v) {
  return {-v(1), v(0)};
}

template <typename A, typename B>
typename A::Scalar cross2(const Eigen::MatrixBase<A>& a,
                          const Eigen::MatrixBase<B>& b) {
  return a(0) * b(1) - a(1) * b(0);
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double normal(Rng& rng, double mean = 0.0, double stddev = 1.0) {
  return std::normal_distribution<double>(mean, stddev)(rng);
}

inline Vec normal_vec(Rng& rng, Eigen::Index n) {
  Vec v(n);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

// 64-bit FNV-1a. Used for config hashes that must be stable across runs and
// platforms, which std::hash does not guarantee.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Whole-file text I/O; throw IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Runs fn(i) for i in [0, n) on up to `jobs` threads in contiguous blocks.
// Results are independent of `jobs` when fn(i) only touches slot i. The
// first exception thrown by any worker is rethrown.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace wbt

#endif  // WBT_COMMON_HPP_
