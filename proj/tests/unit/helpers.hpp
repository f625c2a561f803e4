#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "gnnerator/graph.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gnnerator_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline gnnerator::Graph cycle_graph(std::size_t n) {
  std::vector<gnnerator::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({static_cast<gnnerator::NodeId>(i), static_cast<gnnerator::NodeId>((i + 1) % n)});
  }
  return gnnerator::Graph(n, std::move(edges));
}

// Independent of the library generator: rejection sampling with std::minstd_rand.
inline gnnerator::Graph random_graph(std::size_t n, std::size_t m, unsigned seed) {
  std::minstd_rand rng(seed);
  std::vector<gnnerator::Edge> edges;
  std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
  while (edges.size() < m) {
    auto u = static_cast<gnnerator::NodeId>(rng() % n);
    auto v = static_cast<gnnerator::NodeId>(rng() % n);
    if (u == v || seen[u][v]) continue;
    seen[u][v] = true;
    edges.push_back({u, v});
  }
  return gnnerator::Graph(n, std::move(edges));
}

inline gnnerator::FeatureMatrix random_features(std::size_t n, std::size_t dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  gnnerator::FeatureMatrix h(n, dim);
  for (float& v : h.values()) v = dist(rng);
  return h;
}

}  // namespace testing
