// dpd: generate | train | predistort | simulate | evaluate | bench

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dpd/bench.hpp"
#include "dpd/commands.hpp"
#include "dpd/error.hpp"

namespace {

int fail(const std::string& kind, const std::string& msg, int code) {
  std::cerr << "error: " << kind << ": " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented parallel Hammerstein DPD toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::string out, in, in_b, coeffs, report, with_dpd, kernel = "auto";
  unsigned workers = 1;
  std::size_t bench_n = 1'000'000, chunk_len = 0;
  std::vector<unsigned> workers_list{1, 2, 4};
  int repeats = 5;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  };

  auto* gen = app.add_subcommand("generate", "write the payload waveform as binary I/Q");
  add_config(gen);
  gen->add_option("-o,--out", out, "output .iq file")->required();

  auto* trn = app.add_subcommand("train", "train coefficients on the simulated transmitter");
  add_config(trn);
  trn->add_option("--coeffs", coeffs, "output coefficient JSON")->required();
  trn->add_option("--report", report, "output training report JSON")->required();

  auto* pre = app.add_subcommand("predistort", "apply trained coefficients to an I/Q file");
  add_config(pre);
  pre->add_option("--coeffs", coeffs, "coefficient JSON")->required();
  pre->add_option("-i,--in", in, "input .iq file")->required();
  pre->add_option("-o,--out", out, "output .iq file")->required();
  pre->add_option("-w,--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "run an I/Q file through the transmitter model");
  add_config(sim);
  sim->add_option("-i,--in", in, "input .iq file")->required();
  sim->add_option("-o,--out", out, "output .iq file (PA output)")->required();
  auto* sim_dpd = sim->add_option("--with-dpd", with_dpd, "predistort with these coefficients first");
  sim->add_option("-w,--workers", workers, "worker threads for the predistorter")
      ->check(CLI::PositiveNumber)
      ->needs(sim_dpd);

  auto* eva = app.add_subcommand("evaluate", "PSD CSV (one input) or band suppression JSON (two)");
  add_config(eva);
  eva->add_option("-i,--in", in, "input .iq file (before)")->required();
  eva->add_option("--in-b", in_b, "second .iq file (after)");
  eva->add_option("-o,--out", out, "output file (default stdout)");

  auto* ben = app.add_subcommand("bench", "throughput of the parallel predistorter");
  add_config(ben);
  ben->add_option("-n,--n-samples", bench_n, "samples per run")->check(CLI::PositiveNumber);
  ben->add_option("-w,--workers", workers_list, "worker counts")->delimiter(',');
  ben->add_option("--chunk-len", chunk_len, "samples per chunk (0 = one chunk per worker)");
  ben->add_option("--repeats", repeats, "timed runs per row")->check(CLI::PositiveNumber);
  ben->add_option("--coeffs", coeffs, "coefficient JSON (default: fixed random)");
  ben->add_option("--kernel", kernel, "auto|scalar|avx2|neon");
  ben->add_option("-o,--out", out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    const dpd::ExperimentConfig cfg = dpd::load_experiment(config);
    auto opt = [](const std::string& s) {
      return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
    };
    if (*gen) {
      dpd::cmd::generate(cfg, out);
    } else if (*trn) {
      const auto r = dpd::cmd::train(cfg, coeffs, report);
      for (const auto& it : r.report.iterations)
        std::cout << "iteration " << it.iteration << ": nmse " << it.nmse_db << " dB\n";
      std::cout << "no-dpd nmse " << r.report.baseline_nmse_db << " dB\n";
    } else if (*pre) {
      dpd::cmd::predistort(cfg, coeffs, in, out, workers);
    } else if (*sim) {
      dpd::cmd::simulate(cfg, in, out, opt(with_dpd), workers);
    } else if (*eva) {
      dpd::cmd::evaluate(cfg, in, opt(in_b), opt(out), std::cout);
    } else if (*ben) {
      dpd::cmd::BenchArgs args;
      args.n_samples = bench_n;
      args.workers = workers_list;
      args.chunk_len = chunk_len;
      args.repeats = repeats;
      args.coeffs = opt(coeffs);
      args.kernel = dpd::kernel_isa_from_string(kernel);
      dpd::cmd::bench(cfg, args, out);
    }
  } catch (const dpd::Error& e) {
    return fail(dpd::to_string(e.kind()), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
