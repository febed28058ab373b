#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sol1d/device.hpp"
#include "sol1d/errors.hpp"
#include "sol1d/optics.hpp"
#include "sol1d/sweep.hpp"

using namespace sol1d;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

DeviceStack doped_pn() {
  return build_stack({{"p-CIGS", 1.0, DopingType::acceptor, 1e16},
                      {"n-CdS", 0.5, DopingType::donor, 1e16},
                      {"n-ZnO", 0.5, DopingType::donor, 1e16}},
                     300.0);
}

}  // namespace

TEST_CASE("sweep axis construction and parsing") {
  const auto lin = SweepAxis::parse("CdS.thickness_um=0.5:5.0:0.5");
  CHECK(lin.layer == "CdS");
  CHECK(lin.param == SweepAxis::Param::thickness_um);
  REQUIRE(lin.values.size() == 10);
  CHECK(lin.values.front() == 0.5);
  CHECK(lin.values.back() == 5.0);

  const auto dec = SweepAxis::parse("GaAs.doping_cm3=1e11:1e20");
  CHECK(dec.layer == "GaAs");
  CHECK(dec.param == SweepAxis::Param::doping_cm3);
  REQUIRE(dec.values.size() == 10);
  CHECK(dec.values.front() == 1e11);
  CHECK(dec.values.back() == 1e20);

  const auto dec11 = SweepAxis::decades("CdS", SweepAxis::Param::doping_cm3, 10, 20);
  CHECK(dec11.values.size() == 11);  // one point per decade, 1e10..1e20

  CHECK_THROWS_AS(SweepAxis::parse("CdS.thickness_um=1:2:0"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("CdS.porosity=1:2:1"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("garbage"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("CdS.thickness_um=2:1:1"), ValidationError);
}

TEST_CASE("apply_axis_value targets layers with or without the type prefix") {
  const auto stack = preset_stack("ppn-optimized");
  const auto axis = SweepAxis::parse("GaAs.thickness_um=1:2:1");
  const auto modified = apply_axis_value(stack, axis, 2.0);
  CHECK(modified.layers[0].thickness_um == 2.0);
  CHECK(modified.layers[1].thickness_um == stack.layers[1].thickness_um);

  SweepAxis bad = axis;
  bad.layer = "Foo";
  CHECK_THROWS_WITH_AS(apply_axis_value(stack, bad, 1.0), doctest::Contains("Foo"),
                       ValidationError);
}

TEST_CASE("grid sweep: shape, template cell consistency, and determinism") {
  const auto stack = doped_pn();
  const auto& spectrum = bundled_am15g();
  SolverConfig cfg;
  SweepOptions opts;
  opts.jv.v_max_V = 0.8;

  const auto axis1 = SweepAxis::linear("CIGS", SweepAxis::Param::thickness_um, 1.0, 2.0, 1.0);
  const auto axis2 = SweepAxis::linear("CdS", SweepAxis::Param::thickness_um, 0.5, 1.0, 0.5);

  const HeatmapResult r1 = run_grid_sweep(stack, axis1, axis2, cfg, spectrum, opts);
  CHECK(r1.cells.size() == 4);
  CHECK(r1.failures.empty());
  for (const auto& c : r1.cells) REQUIRE(c.has_value());

  // the (0,0) cell equals a direct computation on the same device
  const IVCurve direct = compute_jv(stack, cfg, spectrum, opts.jv, opts.mesh);
  const CellMetrics dm = extract_metrics(direct);
  CHECK(r1.at(0, 0)->pce == dm.pce);
  CHECK(r1.at(0, 0)->jsc_mA_cm2 == dm.jsc_mA_cm2);
  CHECK(r1.at(0, 0)->voc_V == dm.voc_V);

  SUBCASE("byte-identical CSVs for jobs=1 and jobs=4") {
    namespace fs = std::filesystem;
    const auto d1 = fs::temp_directory_path() / "sol1d_sweep_j1";
    const auto d4 = fs::temp_directory_path() / "sol1d_sweep_j4";
    SweepOptions par = opts;
    par.jobs = 4;
    const HeatmapResult r4 = run_grid_sweep(stack, axis1, axis2, cfg, spectrum, par);
    write_heatmap_csvs(r1, d1);
    write_heatmap_csvs(r4, d4);
    for (const char* f : {"pce.csv", "ff.csv", "jsc.csv", "voc.csv", "failures.csv"}) {
      CAPTURE(f);
      CHECK(slurp(d1 / f) == slurp(d4 / f));
      CHECK_FALSE(slurp(d1 / f).empty());
    }
    fs::remove_all(d1);
    fs::remove_all(d4);
  }
}

TEST_CASE("grid sweep: cell failures are recorded, not fatal") {
  const auto stack = doped_pn();
  const auto& spectrum = bundled_am15g();
  SolverConfig cfg;
  SweepOptions opts;
  opts.jv.v_max_V = 0.8;
  opts.mesh.max_nodes = 400;  // the 400 um cell cannot be meshed within this budget

  const auto axis1 = SweepAxis::linear("CIGS", SweepAxis::Param::thickness_um, 1.0, 400.0, 399.0);
  const auto axis2 = SweepAxis::linear("CdS", SweepAxis::Param::thickness_um, 0.5, 1.0, 0.5);
  const HeatmapResult r = run_grid_sweep(stack, axis1, axis2, cfg, spectrum, opts);
  CHECK(r.failures.size() == 2);
  for (const auto& f : r.failures) CHECK(f.i == 1);
  CHECK(r.at(0, 0).has_value());
  CHECK(r.at(0, 1).has_value());
  CHECK_FALSE(r.at(1, 0).has_value());

  const BestCell best = best_cell(r, Metric::PCE);
  CHECK(best.i == 0);  // argmax over the surviving cells

  SUBCASE("all-failed grid raises") {
    HeatmapResult empty = r;
    empty.cells.assign(empty.cells.size(), std::nullopt);
    CHECK_THROWS_AS(best_cell(empty, Metric::PCE), ValidationError);
  }
}

TEST_CASE("doping-decade sweep: 11x11 grid over 1e10..1e20") {
  // both doping axes, one point per decade, on the baseline stack
  const auto ax1 = SweepAxis::decades("CdS", SweepAxis::Param::doping_cm3, 10, 20);
  const auto ax2 = SweepAxis::decades("CIGS", SweepAxis::Param::doping_cm3, 10, 20);
  SolverConfig cfg;
  const HeatmapResult r =
      run_grid_sweep(preset_stack("pn-baseline"), ax1, ax2, cfg, bundled_am15g(), {});
  CHECK(r.axis1.values.size() == 11);
  CHECK(r.axis2.values.size() == 11);
  CHECK(r.cells.size() == 121);
  CHECK(r.failures.empty());
  // strongest junction wins: PCE argmax sits at the heavily doped corner
  const BestCell best = best_cell(r, Metric::PCE);
  CHECK(best.axis1_value == 1e20);
  CHECK(best.axis2_value == 1e20);
}

TEST_CASE("sweep rejects duplicate axis targets and unknown layers") {
  const auto stack = doped_pn();
  const auto& spectrum = bundled_am15g();
  SolverConfig cfg;
  const auto axis = SweepAxis::linear("CIGS", SweepAxis::Param::thickness_um, 1.0, 2.0, 1.0);
  CHECK_THROWS_WITH_AS(run_grid_sweep(stack, axis, axis, cfg, spectrum, {}),
                       doctest::Contains("same layer parameter"), ValidationError);
  auto foo = axis;
  foo.layer = "Foo";
  CHECK_THROWS_WITH_AS(run_grid_sweep(stack, axis, foo, cfg, spectrum, {}),
                       doctest::Contains("Foo"), ValidationError);
}

TEST_CASE("best_cell argmax and tie-breaking") {
  HeatmapResult r;
  r.axis1 = SweepAxis::linear("CIGS", SweepAxis::Param::thickness_um, 1.0, 8.0, 1.0);
  r.axis2 = SweepAxis::linear("CdS", SweepAxis::Param::thickness_um, 1.0, 9.0, 1.0);
  const std::size_t n1 = r.axis1.values.size(), n2 = r.axis2.values.size();
  r.cells.assign(n1 * n2, std::nullopt);
  auto set_pce = [&](std::size_t i, std::size_t j, double pce) {
    CellMetrics m;
    m.pce = pce;
    m.ff = 0.5;
    m.voc_V = 0.5;
    m.jsc_mA_cm2 = 30.0;
    r.cells[i * n2 + j] = m;
  };
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) set_pce(i, j, 0.10);
  set_pce(3, 7, 0.25);  // known maximum

  const BestCell best = best_cell(r, Metric::PCE);
  CHECK(best.i == 3);
  CHECK(best.j == 7);
  CHECK(best.axis1_value == r.axis1.values[3]);

  SUBCASE("ties prefer smaller axis1, then smaller axis2") {
    set_pce(5, 2, 0.25);  // equal maximum later in row-major order
    const BestCell tie = best_cell(r, Metric::PCE);
    CHECK(tie.i == 3);
    CHECK(tie.j == 7);
    set_pce(3, 4, 0.25);  // equal maximum, same row, smaller column
    const BestCell tie2 = best_cell(r, Metric::PCE);
    CHECK(tie2.i == 3);
    CHECK(tie2.j == 4);
  }

  SUBCASE("single successful cell wins by default") {
    HeatmapResult solo = r;
    solo.cells.assign(n1 * n2, std::nullopt);
    CellMetrics m;
    m.pce = 0.01;
    solo.cells[2 * n2 + 5] = m;
    const BestCell b = best_cell(solo, Metric::PCE);
    CHECK(b.i == 2);
    CHECK(b.j == 5);
  }
}

TEST_CASE("heatmap CSV layout: axis2 header row, axis1 first column") {
  HeatmapResult r;
  r.axis1 = SweepAxis::linear("CIGS", SweepAxis::Param::thickness_um, 1.0, 2.0, 1.0);
  r.axis2 = SweepAxis::linear("CdS", SweepAxis::Param::doping_cm3, 1.0, 3.0, 1.0);
  r.cells.assign(6, std::nullopt);
  CellMetrics m;
  m.pce = 0.125;
  r.cells[0 * 3 + 2] = m;

  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "sol1d_heatmap_test";
  write_heatmap_csvs(r, dir);
  std::ifstream in(dir / "pce.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "CIGS.thickness_um\\CdS.doping_cm3,1,2,3");
  std::getline(in, line);
  CHECK(line == "1,,,12.5");  // percent, empty cells for failures
  std::getline(in, line);
  CHECK(line == "2,,,");
  fs::remove_all(dir);
}
