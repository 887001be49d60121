#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ncl/camera.hpp"
#include "ncl/metrics.hpp"
#include "ncl/pipeline.hpp"
#include "ncl/solvers.hpp"
#include "ncl/synth.hpp"

namespace {

using ncl::CameraModel;
using ncl::Layout;
using ncl::RaySet;

RaySet wall_rays(const CameraModel& cam, double d, double h_c, double h_f, int n) {
  // Rays viewing the plane x = d over a 60 degree arc.
  RaySet rays;
  for (int k = 0; k < n; ++k) {
    const double az = -0.5 + 1.0 * k / (n - 1);
    const double s = d / std::cos(az);
    rays.ceiling.push_back(cam.backproject_pixel(
        cam.project_point({s * std::cos(az), s * std::sin(az), h_c, 1.0})));
    rays.floor.push_back(cam.backproject_pixel(
        cam.project_point({s * std::cos(az), s * std::sin(az), h_f, 1.0})));
  }
  return rays;
}

Layout square_room() {
  Layout l;
  l.h_c = 1.5;
  l.h_f = -1.2;
  l.walls = {{{0.0, -1.0}, 2.0, false},
             {{1.0, 0.0}, 2.0, false},
             {{0.0, 1.0}, 2.0, false},
             {{-1.0, 0.0}, 2.0, false}};
  return l;
}

void BM_ProjectPoint(benchmark::State& state) {
  const CameraModel cam = CameraModel::default_panorama();
  double z = -1.0;
  for (auto _ : state) {
    z = z > 1.0 ? -1.0 : z + 1e-4;
    benchmark::DoNotOptimize(cam.project_point({3.0, 1.0, z, 1.0}));
  }
}
BENCHMARK(BM_ProjectPoint);

void BM_BackprojectPixel(benchmark::State& state) {
  const CameraModel cam = CameraModel::default_panorama();
  double j = 0.5;
  for (auto _ : state) {
    j = j > 1023.0 ? 0.5 : j + 0.37;
    benchmark::DoNotOptimize(cam.backproject_pixel({200.25, j}));
  }
}
BENCHMARK(BM_BackprojectPixel);

void BM_ExtractWall(benchmark::State& state) {
  const CameraModel cam = CameraModel::default_panorama();
  const RaySet rays = wall_rays(cam, 2.5, 1.5, -1.2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ncl::extract_wall(rays));
}
BENCHMARK(BM_ExtractWall)->Arg(8)->Arg(64)->Arg(256);

void BM_SolveManhattan(benchmark::State& state) {
  const CameraModel cam = CameraModel::default_panorama();
  std::vector<RaySet> walls;
  std::vector<int> labels;
  const Layout room = square_room();
  for (std::size_t i = 0; i < room.walls.size(); ++i) {
    RaySet rays;
    const double base = 1.5707963267948966 * static_cast<double>(i);
    for (int k = 0; k < 64; ++k) {
      const double az = base - 0.6 + 1.2 * k / 63.0;
      const double s = 2.0 / std::cos(az - base);
      const double x = s * std::cos(az), y = s * std::sin(az);
      rays.ceiling.push_back(
          cam.backproject_pixel(cam.project_point({x, y, room.h_c, 1.0})));
      rays.floor.push_back(
          cam.backproject_pixel(cam.project_point({x, y, room.h_f, 1.0})));
    }
    walls.push_back(std::move(rays));
    labels.push_back(static_cast<int>(i) % 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ncl::solve_manhattan(walls, labels));
}
BENCHMARK(BM_SolveManhattan);

void BM_RecoverLayout(benchmark::State& state) {
  const CameraModel cam = CameraModel::default_panorama();
  ncl::LayoutSpec spec;
  spec.seed = 17;
  const Layout gt = ncl::generate_layout(spec);
  const ncl::BoundaryMap bm = ncl::project_layout(gt, cam);
  for (auto _ : state)
    benchmark::DoNotOptimize(ncl::recover_layout(bm, cam, ncl::World::manhattan));
}
BENCHMARK(BM_RecoverLayout)->Unit(benchmark::kMillisecond);

void BM_Iou3d(benchmark::State& state) {
  const Layout a = square_room();
  Layout b = a;
  for (auto& w : b.walls) w.d += 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(ncl::iou3d(a, b));
}
BENCHMARK(BM_Iou3d)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
