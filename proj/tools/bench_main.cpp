#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <omp.h>

#include "iclgap/metrics.hpp"
#include "iclgap/rng.hpp"
#include "iclgap/runner.hpp"
#include "iclgap/sampler.hpp"

// Times each OpenMP kernel against its single-threaded reference and checks
// the results are identical. Exit status 0 only if every pair agrees.

namespace fs = std::filesystem;
using namespace iclgap;

namespace {

std::vector<Example> synth_split(int n, int vocab, std::uint64_t seed, Split split) {
  RngStream rng(derive_seed(seed, StreamTag::Synth, {static_cast<std::uint64_t>(split)}));
  std::vector<Example> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int words = 3 + static_cast<int>(rng.below(6));
    std::string in, outp;
    for (int w = 0; w < words; ++w) {
      const auto v = rng.below(static_cast<std::uint64_t>(vocab));
      if (w) {
        in += ' ';
        outp += ' ';
      }
      in += "w" + std::to_string(v);
      outp += "W" + std::to_string(v);
    }
    out.push_back({static_cast<std::int32_t>(i), in, outp, split});
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

int main() {
  int failures = 0;
  const DatasetDescriptor desc{DatasetId::Custom, "whitespace", "scan", "strip-period"};
  std::printf("threads: %d\n\n", omp_get_max_threads());

  {
    const auto train = synth_split(600, 40, 7, Split::Train);
    const auto test = synth_split(600, 48, 7, Split::Test);
    const std::vector<std::uint64_t> seeds{0, 1, 2};
    double t0 = omp_get_wtime();
    const double serial = coverage_stats_serial(desc, EvalSetting::TrainToTest, test, train,
                                                5, seeds, 200);
    double t1 = omp_get_wtime();
    const double parallel =
        coverage_stats(desc, EvalSetting::TrainToTest, test, train, 5, seeds, 200);
    double t2 = omp_get_wtime();
    const bool ok = serial == parallel;
    failures += ok ? 0 : 1;
    std::printf("coverage_stats      serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
                t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ok ? "match" : "MISMATCH");
  }

  {
    std::vector<std::uint8_t> flags(2000);
    RngStream rng(derive_seed(11, StreamTag::Synth, {1}));
    for (auto& f : flags) f = rng.next_double01() < 0.7 ? 1 : 0;
    double t0 = omp_get_wtime();
    const CiBounds serial = bootstrap_ci_serial(flags, 20000, 0.95, 42);
    double t1 = omp_get_wtime();
    const CiBounds parallel = bootstrap_ci(flags, 20000, 0.95, 42);
    double t2 = omp_get_wtime();
    const bool ok = serial == parallel;
    failures += ok ? 0 : 1;
    std::printf("bootstrap_ci        serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
                t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ok ? "match" : "MISMATCH");
  }

  {
    const fs::path base = fs::temp_directory_path() / "iclgap_bench";
    fs::remove_all(base);
    const auto train = synth_split(300, 36, 3, Split::Train);
    const auto test = synth_split(300, 42, 3, Split::Test);
    fs::create_directories(base);
    const std::string train_path = (base / "train.tsv").string();
    const std::string test_path = (base / "test.tsv").string();
    save_split(train_path, train, FileFormat::Tsv);
    save_split(test_path, test, FileFormat::Tsv);

    RunConfig cfg;
    cfg.dataset = desc;
    cfg.train_path = train_path;
    cfg.test_path = test_path;
    cfg.shots = 5;
    cfg.seeds = {0, 1};
    cfg.max_queries = 150;
    cfg.endpoint.kind = EndpointKind::OracleMock;
    cfg.resamples = 100;

    cfg.out_dir = (base / "serial").string();
    cfg.concurrency = 1;
    double t0 = omp_get_wtime();
    const std::string serial_record = run(cfg);
    double t1 = omp_get_wtime();
    cfg.out_dir = (base / "parallel").string();
    cfg.concurrency = 0;
    const std::string parallel_record = run(cfg);
    double t2 = omp_get_wtime();
    const bool ok = slurp(serial_record) == slurp(parallel_record);
    failures += ok ? 0 : 1;
    std::printf("batch run (oracle)  serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
                t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ok ? "match" : "MISMATCH");
    fs::remove_all(base);
  }

  if (failures) std::printf("\n%d kernel pair(s) disagree\n", failures);
  return failures ? 1 : 0;
}
