#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "alesupg/mesh.hpp"
#include "alesupg/meshgen.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SOLVER_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("alesupg_cli_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("run /nonexistent/dir/config.ini"), 3);
  EXPECT_EQ(run("run --preset example9"), 1);
  EXPECT_EQ(run("check-mesh /nonexistent/dir/mesh.txt"), 3);

  const auto no_dt = write_file("no_dt.ini", "[scenario]\nname = x\n[stepper]\nscheme = be\n");
  EXPECT_EQ(run("run " + no_dt.string()), 1);
  const auto bad_key = write_file("bad_key.ini", "[stepper]\ndt = 0.1\nwobble = 2\n");
  EXPECT_EQ(run("run " + bad_key.string()), 1);

  const auto bad_mesh = write_file("bad.mesh", "tri-mesh v1\nnodes 3\n0 0\n1 0\n0 1\ncells 1\n0 1 5\nboundary 0\n");
  EXPECT_EQ(run("check-mesh " + bad_mesh.string()), 1);
  const auto good_mesh = (fs::temp_directory_path() / "alesupg_cli_good.mesh").string();
  alesupg::write_mesh(good_mesh, alesupg::unit_square(4));
  EXPECT_EQ(run("check-mesh " + good_mesh), 0);

  for (const char* f : {"no_dt.ini", "bad_key.ini", "bad.mesh", "good.mesh"})
    fs::remove(fs::temp_directory_path() / (std::string("alesupg_cli_") + f));
}

TEST(Cli, RunsPresetAndConvergence) {
  const auto out = fs::temp_directory_path() / "alesupg_cli_out";
  fs::remove_all(out);
  EXPECT_EQ(run("run --preset example1 --T 0.02 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "example1_ledger.csv"));
  EXPECT_TRUE(fs::exists(out / "example1_l2.csv"));
  EXPECT_EQ(run("run --preset example1 --scheme cn --T 0.02 --dt 0.01"), 0);
  EXPECT_EQ(run("run --preset example1 --scheme rk4"), 1);
  EXPECT_EQ(run("converge " + std::string(ALESUPG_CONFIG_DIR) + "/mms_time_cn.ini --levels 2"), 0);
  EXPECT_EQ(run("converge " + std::string(ALESUPG_CONFIG_DIR) + "/mms_time_cn.ini --levels 1"), 1);
  fs::remove_all(out);
}
