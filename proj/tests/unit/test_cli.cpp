#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// runs the CLI binary, capturing stdout+stderr
RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SOL1D_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli simulate: baseline preset writes band diagram and metrics stub") {
  const auto out = fresh_dir("sol1d_cli_sim");
  const auto r = run_cli("simulate --preset pn-baseline --out " + out.string());
  CAPTURE(r.output);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "band_diagram.csv"));
  CHECK(fs::exists(out / "metrics.json"));

  // Ec - Ev equals the local gap on every row
  std::ifstream csv(out / "band_diagram.csv");
  std::string line;
  std::getline(csv, line);  // header
  CHECK(line == "x_um,Ec_eV,Ev_eV,EFn_eV,EFp_eV");
  int rows = 0;
  while (std::getline(csv, line)) {
    double x, ec, ev, efn, efp;
    char c;
    std::istringstream is(line);
    is >> x >> c >> ec >> c >> ev >> c >> efn >> c >> efp;
    const double gap = ec - ev;
    CHECK(gap > 1.0);
    CHECK(gap < 3.4);
    ++rows;
  }
  CHECK(rows >= 24);
  fs::remove_all(out);
}

TEST_CASE("cli simulate: PPN preset lists four layers back to front") {
  const auto out = fresh_dir("sol1d_cli_ppn");
  const auto r = run_cli("simulate --preset ppn-optimized --out " + out.string());
  CAPTURE(r.output);
  CHECK(r.exit_code == 0);
  const auto gaas = r.output.find("p-GaAs");
  const auto cigs = r.output.find("p-CIGS");
  const auto cds = r.output.find("n-CdS");
  const auto zno = r.output.find("n-ZnO");
  CHECK(gaas != std::string::npos);
  CHECK(gaas < cigs);
  CHECK(cigs < cds);
  CHECK(cds < zno);
  CHECK(r.output.find("4 layers") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("cli jv: default grid on the baseline preset has 66 samples") {
  const auto out = fresh_dir("sol1d_cli_jv");
  const auto r = run_cli("jv --preset pn-baseline --out " + out.string());
  CAPTURE(r.output);
  CHECK(r.exit_code == 0);
  std::ifstream csv(out / "jv.csv");
  int rows = -1;  // header
  std::string line;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 66);
  CHECK(fs::exists(out / "pv.csv"));

  // metrics.json satisfies PCE = Voc*Jsc*FF/Pin after the serialization round trip
  std::ostringstream os;
  os << std::ifstream(out / "metrics.json").rdbuf();
  const std::string mj = os.str();
  auto field = [&](const std::string& key) {
    const auto pos = mj.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    return std::stod(mj.substr(pos + key.size() + 3));
  };
  const double pce = field("pce_percent") / 100.0;
  const double identity =
      field("voc_V") * field("jsc_mA_cm2") * (field("ff_percent") / 100.0) / field("pin_mW_cm2");
  CHECK(std::abs(pce - identity) <= 1e-6 * pce);
  fs::remove_all(out);
}

TEST_CASE("cli jv: dark run nulls the illuminated metrics") {
  const auto out = fresh_dir("sol1d_cli_dark");
  const auto r = run_cli("jv --preset pn-baseline --dark --vmax 0.4 --out " + out.string());
  CHECK(r.exit_code == 0);
  std::ifstream mj(out / "metrics.json");
  std::ostringstream os;
  os << mj.rdbuf();
  const std::string text = os.str();
  CHECK(text.find("\"jsc_mA_cm2\": null") != std::string::npos);
  CHECK(text.find("\"ff_percent\": null") != std::string::npos);
  CHECK(text.find("\"pce_percent\": null") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("cli qe: row counts follow the wavelength grid") {
  const auto out = fresh_dir("sol1d_cli_qe");
  auto count_rows = [&]() {
    std::ifstream csv(out / "qe.csv");
    int rows = -1;  // header
    std::string line;
    while (std::getline(csv, line)) ++rows;
    return rows;
  };
  auto r = run_cli("qe --preset pn-baseline --out " + out.string());
  CAPTURE(r.output);
  CHECK(r.exit_code == 0);
  CHECK(count_rows() == 91);  // 300-1200 nm step 10

  r = run_cli("qe --preset pn-baseline --wl-start 300 --wl-stop 900 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(count_rows() == 61);

  // every value in [0, 1]
  std::ifstream csv(out / "qe.csv");
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    const double eqe = std::stod(line.substr(comma + 1));
    CHECK(eqe >= 0.0);
    CHECK(eqe <= 1.0);
  }
  fs::remove_all(out);
}

TEST_CASE("cli validation failures exit nonzero with a named cause") {
  const auto out = fresh_dir("sol1d_cli_err");

  SUBCASE("zero voltage step") {
    const auto r = run_cli("jv --preset pn-baseline --vstep 0 --out " + out.string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("step") != std::string::npos);
  }
  SUBCASE("malformed device file") {
    const auto bad = out / "bad.json";
    std::ofstream(bad) << "{\"layers\": [{\"thickness_um\": 1.0}]}";
    const auto r = run_cli("simulate --device " + bad.string() + " --out " + out.string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("material") != std::string::npos);
  }
  SUBCASE("unknown sweep layer") {
    const auto r = run_cli("sweep --preset pn-baseline --axis1 Foo.thickness_um=1:2:1 "
                           "--axis2 CdS.thickness_um=1:2:1 --out " +
                           out.string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("Foo") != std::string::npos);
  }
  SUBCASE("missing device and preset") {
    const auto r = run_cli("simulate --out " + out.string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("--device") != std::string::npos);
  }
  fs::remove_all(out);
}
