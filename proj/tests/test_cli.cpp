// Copyright 2026 The sublevel Authors
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

// Runs the command-line tool as a subprocess.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const fs::path kScratch = SUBLEVEL_SCRATCH;

int run(const std::string& args, const std::string& log = "last.log") {
  fs::create_directories(kScratch);
  std::string cmd = std::string(SUBLEVEL_CLI) + " " + args + " > " +
                    (kScratch / log).string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out_dir(const char* name) {
  fs::path d = kScratch / name;
  fs::remove_all(d);
  return d.string();
}

}  // namespace

TEST_CASE("train then connect from a config file") {
  std::string out = out_dir("train_connect");
  fs::create_directories(kScratch);
  fs::path cfg = kScratch / "exp.cfg";
  std::ofstream(cfg) << "# desk-scale run\n"
                        "widths = [2, 4, 1]\n"
                        "loss = \"square\"\n"
                        "data_n = 3\n"
                        "steps = 2000\n"
                        "lr = 0.05\n"
                        "alpha = \"max\"\n";
  REQUIRE(run("--config " + cfg.string() + " --out " + out + " train") == 0);
  CHECK(fs::exists(fs::path(out) / "theta_a.json"));
  CHECK(fs::exists(fs::path(out) / "theta_b.json"));
  CHECK(slurp(fs::path(out) / "train.json").find("\"loss_a\"") != std::string::npos);

  REQUIRE(run("--config " + cfg.string() + " --out " + out + " connect") == 0);
  std::string csv = slurp(fs::path(out) / "trace.csv");
  CHECK(csv.rfind("segment_index,lambda,loss,param_l2_norm,output_drift\n", 0) == 0);
  CHECK(slurp(fs::path(out) / "report.json").find("\"passed\": true") != std::string::npos);

  CHECK(run("--config " + cfg.string() + " --out " + out + " --samples 50 verify") == 0);
  CHECK(run("--out " + out + " --alpha 1e-30 connect", "alpha.log") == 2);
  CHECK(slurp(kScratch / "alpha.log").find("precondition") != std::string::npos);
}

TEST_CASE("zero steps and divergence") {
  std::string out = out_dir("zero");
  REQUIRE(run("--widths 2,4,1 --data_n 3 --steps 0 --out " + out + " train") == 0);
  CHECK(run("--widths 2,4,1 --data_n 3 --lr 1e6 --out " + out + " train", "div.log") == 2);
  CHECK(slurp(kScratch / "div.log").find("smaller learning rate") != std::string::npos);
}

TEST_CASE("width-N network is rejected by connect") {
  std::string out = out_dir("narrow");
  REQUIRE(run("--widths 2,3,1 --data_n 3 --steps 10 --out " + out + " train") == 0);
  CHECK(run("--out " + out + " connect", "narrow.log") == 2);
  CHECK(slurp(kScratch / "narrow.log").find("n_1 must be >= N+1") != std::string::npos);
}

TEST_CASE("certify") {
  std::string out = out_dir("cert");
  REQUIRE(run("--data_n 4 --seed 7 --out " + out + " certify") == 0);
  std::string cert = slurp(fs::path(out) / "certificate.json");
  CHECK(cert.find("\"valid\": true") != std::string::npos);
  auto pos = cert.find("\"straight\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(cert.substr(pos + 12)) > 0.0);

  std::string minimal = out_dir("cert2");
  CHECK(run("--data_n 2 --out " + minimal + " certify") == 0);
  CHECK(run("--data_n 4 --widths 1,5,5 --out " + minimal + " certify", "rigged.log") == 2);
  CHECK(slurp(kScratch / "rigged.log").find("n_1 must equal N") != std::string::npos);
}

TEST_CASE("identical runs write identical files") {
  std::string a = out_dir("repro_a"), b = out_dir("repro_b");
  REQUIRE(run("--data_n 3 --seed 11 --out " + a + " certify") == 0);
  REQUIRE(run("--data_n 3 --seed 11 --out " + b + " certify") == 0);
  CHECK(slurp(fs::path(a) / "certificate.json") == slurp(fs::path(b) / "certificate.json"));
  REQUIRE(run("--data_n 3 --seed 11 --out " + a + " contrast") == 0);
  REQUIRE(run("--data_n 3 --seed 11 --out " + b + " contrast") == 0);
  for (const char* f : {"contrast.json", "report.json", "path.json", "trace.csv"}) {
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
  }
}
