#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// The built binary, injected by the build; every case drives it end to end.
const std::string kCli = GRAPHMAX_CLI_PATH;

int run(const std::string& args, std::string* output = nullptr) {
  fs::path log = fs::temp_directory_path() / "graphmax_cli_log.txt";
  std::string cmd = kCli + " " + args + " >" + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  int code = -1;
#if defined(_WIN32)
  code = status;
#else
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
#endif
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_data_lines(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  int n = -1;  // skip header
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

// Six triangles and six 4-cliques in the flat-file layout the loader reads.
struct ToyData {
  fs::path root;

  ToyData() {
    root = fs::temp_directory_path() / "graphmax_cli_data" / "TOY";
    fs::create_directories(root);
    std::ofstream a(root / "TOY_A.txt");
    std::ofstream ind(root / "TOY_graph_indicator.txt");
    std::ofstream lab(root / "TOY_graph_labels.txt");
    int next = 1;
    for (int g = 0; g < 12; ++g) {
      int n = (g < 6) ? 3 : 4;
      lab << (g < 6 ? 0 : 1) << "\n";
      for (int i = 0; i < n; ++i) ind << (g + 1) << "\n";
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          bool edge = (n == 4) || (j == (i + 1) % n) || (i == (j + 1) % n);
          if (edge) a << (next + i) << ", " << (next + j) << "\n";
        }
      }
      next += n;
    }
  }
  ~ToyData() { fs::remove_all(root.parent_path()); }
};

fs::path write_config(const std::string& tag, const std::string& body) {
  fs::path p = fs::temp_directory_path() / ("graphmax_cli_cfg_" + tag + ".json");
  std::ofstream out(p);
  out << body;
  return p;
}

const char* kGoodConfig = R"({
  "dataset": "TOY",
  "feature_policy": "one-hot-degree",
  "seed": 9,
  "workers": 1,
  "encoder": {"num_layers": 2, "hidden_units": [8], "patience": 3, "max_epochs": 8},
  "hierarchy": {"num_levels": 3, "pool_ratio": 0.5, "embed_dim": 6,
                "n_p": 2, "n_h": 2, "patience": 3, "max_epochs": 8}
})";

}  // namespace

TEST_CASE("training writes a manifest and one embedding row per graph") {
  ToyData data;
  fs::path config = write_config("good", kGoodConfig);
  fs::path out = fs::temp_directory_path() / "graphmax_cli_train";
  fs::remove_all(out);

  std::string log;
  int code = run("train --config " + config.string() + " --data " + data.root.string() +
                     " --out " + out.string(),
                 &log);
  INFO(log);
  REQUIRE(code == 0);
  CHECK(fs::is_regular_file(out / "manifest.json"));
  CHECK(fs::is_regular_file(out / "config.json"));
  CHECK(fs::is_regular_file(out / "model.params"));
  CHECK(fs::is_regular_file(out / "encoder.params"));
  CHECK(fs::is_regular_file(out / "summaries.csv"));
  CHECK(fs::is_regular_file(out / "metrics_phase1.csv"));
  CHECK(fs::is_regular_file(out / "metrics_phase2.csv"));
  REQUIRE(fs::is_regular_file(out / "embeddings.csv"));
  CHECK(count_data_lines(out / "embeddings.csv") == 12);

  std::string manifest = slurp(out / "manifest.json");
  CHECK(manifest.find("\"dataset_checksum\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 9") != std::string::npos);

  SUBCASE("a second run with the same seed reproduces the bytes") {
    fs::path out2 = fs::temp_directory_path() / "graphmax_cli_train2";
    fs::remove_all(out2);
    int code2 = run("train --config " + config.string() + " --data " + data.root.string() +
                    " --out " + out2.string());
    REQUIRE(code2 == 0);
    CHECK(slurp(out / "embeddings.csv") == slurp(out2 / "embeddings.csv"));
    CHECK(slurp(out / "model.params") == slurp(out2 / "model.params"));
    fs::remove_all(out2);
  }
  SUBCASE("a different seed moves the embeddings") {
    fs::path out2 = fs::temp_directory_path() / "graphmax_cli_train3";
    fs::remove_all(out2);
    int code2 = run("train --config " + config.string() + " --data " + data.root.string() +
                    " --out " + out2.string() + " --seed 77");
    REQUIRE(code2 == 0);
    CHECK(slurp(out / "embeddings.csv") != slurp(out2 / "embeddings.csv"));
    fs::remove_all(out2);
  }
  SUBCASE("evaluation tasks consume the embeddings") {
    fs::path eval_out = fs::temp_directory_path() / "graphmax_cli_eval";
    fs::remove_all(eval_out);
    std::string elog;
    int ecode = run("eval --embeddings " + (out / "embeddings.csv").string() +
                        " --task classify --seed 3 --out " + eval_out.string(),
                    &elog);
    INFO(elog);
    REQUIRE(ecode == 0);
    CHECK(fs::is_regular_file(eval_out / "cv_report.json"));
    CHECK(fs::is_regular_file(eval_out / "cv_folds.csv"));
    CHECK(elog.find("mean accuracy") != std::string::npos);

    ecode = run("eval --embeddings " + (out / "embeddings.csv").string() +
                    " --task cluster --seed 3 --out " + eval_out.string(),
                &elog);
    REQUIRE(ecode == 0);
    CHECK(fs::is_regular_file(eval_out / "cluster_report.json"));

    ecode = run("eval --embeddings " + (out / "embeddings.csv").string() +
                    " --task project --out " + eval_out.string(),
                &elog);
    REQUIRE(ecode == 0);
    REQUIRE(fs::is_regular_file(eval_out / "projection.csv"));
    CHECK(count_data_lines(eval_out / "projection.csv") == 12);
    fs::remove_all(eval_out);
  }
  fs::remove_all(out);
  fs::remove(config);
}

TEST_CASE("a missing dataset exits with the dataset code") {
  fs::path config = write_config("nodata", kGoodConfig);
  fs::path out = fs::temp_directory_path() / "graphmax_cli_missing";
  std::string log;
  int code = run("train --config " + config.string() + " --data /nonexistent/dir --out " +
                     out.string(),
                 &log);
  CHECK(code == 2);
  CHECK(log.find("error:") != std::string::npos);
  CHECK(log.find("/nonexistent/dir") != std::string::npos);

  ToyData data;
  fs::path wrong = write_config("wrongname", R"({"dataset": "ABSENT"})");
  code = run("train --config " + wrong.string() + " --data " + data.root.string() + " --out " +
                 out.string(),
             &log);
  CHECK(code == 2);
  CHECK(log.find("ABSENT_A.txt") != std::string::npos);
  fs::remove(config);
  fs::remove(wrong);
}

TEST_CASE("a broken configuration exits with the config code") {
  ToyData data;
  fs::path out = fs::temp_directory_path() / "graphmax_cli_badcfg";
  std::string log;

  fs::path junk = write_config("junk", "{ not json");
  int code = run("train --config " + junk.string() + " --data " + data.root.string() +
                     " --out " + out.string(),
                 &log);
  CHECK(code == 3);

  fs::path unknown = write_config("unknown", R"({"dataset": "TOY", "no_such_key": 1})");
  code = run("train --config " + unknown.string() + " --data " + data.root.string() + " --out " +
                 out.string(),
             &log);
  CHECK(code == 3);
  CHECK(log.find("no_such_key") != std::string::npos);

  fs::path invalid = write_config(
      "invalid", R"({"dataset": "TOY", "hierarchy": {"pool_ratio": 1.5}})");
  code = run("train --config " + invalid.string() + " --data " + data.root.string() + " --out " +
                 out.string(),
             &log);
  CHECK(code == 3);
  CHECK(log.find("pool_ratio") != std::string::npos);

  fs::path absent = fs::temp_directory_path() / "graphmax_no_such_config.json";
  code = run("train --config " + absent.string() + " --data " + data.root.string() + " --out " +
                 out.string(),
             &log);
  CHECK(code == 3);
  fs::remove(junk);
  fs::remove(unknown);
  fs::remove(invalid);
}

TEST_CASE("ablation compares every variant in one table") {
  ToyData data;
  fs::path config = write_config("ablate", kGoodConfig);
  fs::path out = fs::temp_directory_path() / "graphmax_cli_ablate";
  fs::remove_all(out);
  std::string log;
  int code = run("ablate --config " + config.string() + " --data " + data.root.string() +
                     " --out " + out.string(),
                 &log);
  INFO(log);
  REQUIRE(code == 0);
  REQUIRE(fs::is_regular_file(out / "comparison.csv"));

  std::ifstream csv(out / "comparison.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "variant, mean_acc, std_acc, wall_seconds");
  std::vector<std::string> variants;
  std::string line;
  while (std::getline(csv, line)) {
    if (!line.empty()) variants.push_back(line.substr(0, line.find(',')));
  }
  REQUIRE(variants.size() == 5);
  CHECK(variants[0] == "full");
  CHECK(fs::is_regular_file(out / "embeddings_full.csv"));
  CHECK(fs::is_regular_file(out / "manifest_full.json"));
  CHECK(fs::is_regular_file(out / "manifest_minus-h.json"));
  CHECK(fs::is_regular_file(out / "manifest.json"));
  fs::remove_all(out);
  fs::remove(config);
}

TEST_CASE("usage errors are reported without work") {
  std::string log;
  CHECK(run("", &log) != 0);
  CHECK(run("frobnicate --config x", &log) != 0);
  CHECK(run("eval --embeddings /tmp/none.csv --task dance", &log) != 0);
  CHECK(run("train --config only.json", &log) != 0);  // missing required flags
}
