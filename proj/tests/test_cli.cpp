#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hybridavg/trajectory.hpp"

namespace fs = std::filesystem;
using namespace hybridavg;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("hybridavg_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  Run run(const std::string& args, const std::string& env = "") const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = env + " '" + std::string(HYBRIDAVG_CLI) + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path dir_;
};

const std::string kConfig = std::string(HYBRIDAVG_CONFIG_DIR) + "/paper4.cfg";

std::vector<CsvRow> read_csv(const fs::path& p) {
  std::ifstream in(p);
  return read_trajectory_csv(in);
}

}  // namespace

TEST_CASE("simulate writes a named, ordered trajectory") {
  Sandbox box;
  const Run r = box.run("simulate --config " + kConfig + " --epsilon 1 --seed 42 --out " + box.dir().string());
  REQUIRE(r.code == 0);
  const fs::path file = box.dir() / "traj_eps1_s42.csv";
  REQUIRE(fs::exists(file));
  const auto rows = read_csv(file);
  REQUIRE(rows.size() > 2);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].t >= rows[i - 1].t);
  CHECK(rows.front().n == 30.0);
  CHECK(rows.back().t == 20.0);
  for (const auto& row : rows) CHECK(row.x.has_value());
}

TEST_CASE("epsilon 0 simulates the averaged chain with the fast variable filled in") {
  Sandbox box;
  const Run r = box.run("simulate --config " + kConfig + " --epsilon 0 --seed 3 --out " + box.dir().string());
  REQUIRE(r.code == 0);
  const auto rows = read_csv(box.dir() / "traj_eps0_s3.csv");
  REQUIRE(rows.size() > 2);
  for (const auto& row : rows) {
    REQUIRE(row.x.has_value());
    CHECK(*row.x > 0.0);
    CHECK(*row.x <= 7.0);
  }
  CHECK(*rows.front().x == doctest::Approx(0.4138617255817282).epsilon(1e-10));
}

TEST_CASE("repeated runs produce identical files") {
  Sandbox box;
  const std::string args = "simulate --config " + kConfig + " --epsilon 0.5 --seed 8 --out ";
  REQUIRE(box.run(args + (box.dir() / "a").string()).code == 0);
  REQUIRE(box.run(args + (box.dir() / "b").string()).code == 0);
  CHECK(slurp(box.dir() / "a" / "traj_eps0.5_s8.csv") == slurp(box.dir() / "b" / "traj_eps0.5_s8.csv"));
}

TEST_CASE("seed falls back to the environment") {
  Sandbox box;
  const Run r = box.run("simulate --epsilon 1 --t-end 2 --out " + box.dir().string(), "HYBRIDAVG_SEED=77");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(box.dir() / "traj_eps1_s77.csv"));
  CHECK(box.run("simulate --epsilon 1 --t-end 2 --out " + box.dir().string(), "HYBRIDAVG_SEED=abc").code == 1);
}

TEST_CASE("missing model key is a configuration error") {
  Sandbox box;
  std::string text = slurp(kConfig);
  text.erase(text.find("x_in"), text.find('\n', text.find("x_in")) - text.find("x_in"));
  const fs::path cfg = box.write("broken.cfg", text);
  const Run r = box.run("simulate --config " + cfg.string() + " --out " + box.dir().string());
  CHECK(r.code == 1);
  CHECK(r.err.find("model.x_in") != std::string::npos);
}

TEST_CASE("bad flags and values are configuration errors") {
  Sandbox box;
  CHECK(box.run("simulate --epsilon 3").code == 1);
  CHECK(box.run("frobnicate").code == 1);
  CHECK(box.run("").code == 1);
  CHECK(box.run("compare --reps 0").code == 1);
  CHECK(box.run("absorb --m -2").code == 1);
  CHECK(box.run("simulate --config /nonexistent.cfg").code == 1);
}

TEST_CASE("unwritable output is a runtime error") {
  Sandbox box;
  const fs::path blocker = box.write("blocker", "x");
  const Run r = box.run("simulate --epsilon 1 --t-end 1 --out " + (blocker / "sub").string());
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("compare prints the table and a summary file") {
  Sandbox box;
  const Run r = box.run("compare --config " + kConfig + " --reps 40 --workers 2 --out " + box.dir().string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mean n(20)") != std::string::npos);
  CHECK(r.out.find("gap to the averaged model") != std::string::npos);
  const std::string csv = slurp(box.dir() / "summary.csv");
  CHECK(csv.rfind("epsilon,count,mean,sd,se,min,q1,median,q3,max,censored\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("compare with a single epsilon has no gap report") {
  Sandbox box;
  const Run r = box.run("compare --epsilon 1 --reps 10 --out " + box.dir().string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("gap to the averaged model") == std::string::npos);
}

TEST_CASE("absorb reports certain absorption and the oracle") {
  Sandbox box;
  const Run r = box.run("absorb --config " + kConfig + " --m 0 --m 1 --m 30 --oracle --out " + box.dir().string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("285.145304") != std::string::npos);
  CHECK(r.out.find("76.407790") != std::string::npos);
  const std::string csv = slurp(box.dir() / "absorption.csv");
  CHECK(csv.find("\n0,1,") != std::string::npos);
  CHECK(csv.find("\n30,1,diverges,") != std::string::npos);
}

TEST_CASE("strict mode fails on undetermined verdicts") {
  Sandbox box;
  std::string text = slurp(kConfig);
  text.replace(text.find("i_max      = 100000"), 19, "i_max      = 3");
  const fs::path tight = box.write("tight.cfg", text);
  CHECK(box.run("absorb --config " + tight.string() + " --m 1").code == 0);
  CHECK(box.run("absorb --config " + tight.string() + " --m 1 --strict").code == 2);
  CHECK(box.run("absorb --config " + kConfig + " --m 1 --strict").code == 0);
}
