#include <gtest/gtest.h>

#include <map>
#include <set>

#include "ihrl/compression.hpp"
#include "ihrl/errors.hpp"

using namespace ihrl;

TEST(Compression, GridFormulaExamples) {
  const Compression f({4, 4, 0, 0}, 16, 16);
  EXPECT_EQ(f(0, 0), 0);
  EXPECT_EQ(f(5, 2), 1);
  EXPECT_EQ(f(5, 2), f(6, 3));
  EXPECT_EQ(f(0, 4), 4);
  EXPECT_EQ(f(15, 15), 15);
  EXPECT_EQ(f.columns(), 4);
}

TEST(Compression, ColumnsRoundUp) {
  const Compression f({4, 4, 0, 0}, 17, 17);
  EXPECT_EQ(f.columns(), 5);
  EXPECT_EQ(f.rows(), 5);
  EXPECT_EQ(f(16, 0), 4);
  EXPECT_EQ(f(0, 16), 20);
  EXPECT_EQ(f.region_coords(f(9, 13)), (Cell{2, 3}));
}

TEST(Compression, DefaultsPerLayout) {
  EXPECT_EQ(default_compression(LayoutId::kKdt1), (CompressionSpec{4, 4, 0, 0}));
  EXPECT_EQ(default_compression(LayoutId::kHazard), (CompressionSpec{5, 5, 0, 0}));
}

TEST(Compression, RejectsInvalidSpecs) {
  EXPECT_THROW(Compression({0, 4, 0, 0}, 10, 10), ConfigError);
  EXPECT_THROW(Compression({4, 4, 4, 0}, 10, 10), ConfigError);
  EXPECT_THROW(Compression({4, 4, 0, -1}, 10, 10), ConfigError);
  const Compression f({4, 4, 0, 0}, 10, 10);
  EXPECT_THROW(f(10, 0), UsageError);
}

TEST(Compression, OriginOffsetShiftsTheOverlay) {
  const Compression f({4, 4, 2, 1}, 12, 12);
  // columns: x in [0,2) | [2,6) | [6,10) | [10,12)
  EXPECT_EQ(f(0, 0), 0);
  EXPECT_EQ(f(1, 0), f(0, 0));
  EXPECT_NE(f(2, 0), f(1, 0));
  EXPECT_EQ(f(2, 0), f(5, 0));
  EXPECT_NE(f(5, 0), f(6, 0));
  EXPECT_NE(f(0, 0), f(0, 1));
  EXPECT_EQ(f(0, 1), f(0, 4));
}

// Every cell in [0,w)x[0,h) lands in exactly one id, ids are dense in
// [0, columns*rows), and cells sharing an id form one axis-aligned block no
// larger than the cell size.
TEST(CompressionProperty, PartitionOfTheGrid) {
  for (CompressionSpec spec : {CompressionSpec{4, 4, 0, 0}, CompressionSpec{5, 5, 0, 0},
                               CompressionSpec{3, 2, 1, 1}, CompressionSpec{1, 1, 0, 0},
                               CompressionSpec{7, 3, 6, 2}}) {
    for (auto [w, h] : {std::pair{17, 17}, std::pair{20, 15}, std::pair{9, 4}}) {
      const Compression f(spec, w, h);
      std::map<RegionId, std::vector<Cell>> cells;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const RegionId z = f(x, y);
          ASSERT_EQ(z, f(x, y));
          ASSERT_GE(z, 0);
          ASSERT_LT(z, f.columns() * f.rows());
          cells[z].push_back({x, y});
        }
      std::size_t covered = 0;
      for (const auto& [z, members] : cells) {
        int x0 = w, x1 = -1, y0 = h, y1 = -1;
        for (Cell c : members) {
          x0 = std::min(x0, c.x);
          x1 = std::max(x1, c.x);
          y0 = std::min(y0, c.y);
          y1 = std::max(y1, c.y);
        }
        EXPECT_LE(x1 - x0 + 1, spec.cell_width);
        EXPECT_LE(y1 - y0 + 1, spec.cell_height);
        EXPECT_EQ(std::size_t((x1 - x0 + 1) * (y1 - y0 + 1)), members.size());
        covered += members.size();
      }
      EXPECT_EQ(covered, std::size_t(w * h));
    }
  }
}

TEST(CompressionProperty, OneStepNeighborsAreAdjacentCells) {
  for (LayoutId id : {LayoutId::kKdt1, LayoutId::kKdt2, LayoutId::kHazard}) {
    const GridEnv env(default_config(id));
    const Compression f(default_compression(id), env.width(), env.height());
    for (int y = 0; y < env.height(); ++y)
      for (int x = 0; x < env.width(); ++x) {
        if (!env.map().passable({x, y})) continue;
        for (int a = 0; a < kNumActions; ++a) {
          const Cell n = env.invariant_move({x, y}, a);
          if (f(n) == f(x, y)) continue;
          const Cell p = f.region_coords(f(x, y));
          const Cell q = f.region_coords(f(n));
          EXPECT_EQ(std::abs(p.x - q.x) + std::abs(p.y - q.y), 1);
        }
      }
  }
}
