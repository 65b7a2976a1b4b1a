// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "snra/cli.hpp"
#include "snra/snra.hpp"

using namespace snra;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && outcome_.pass) {
      outcome_.pass = false;
      outcome_.detail = what;
    }
  }
  void note(const std::string& text) {
    if (outcome_.pass) outcome_.detail = text;
  }
  Outcome result() const { return outcome_; }

 private:
  Outcome outcome_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const fs::path kData = SNRA_DATA_DIR;
const fs::path kGolden = SNRA_GOLDEN_DIR;

LabeledBitSet mnist_train(std::size_t n) {
  return load_idx(kData / "mnist/train-images-idx3-ubyte.gz", kData / "mnist/train-labels-idx1-ubyte.gz", n);
}
LabeledBitSet mnist_test(std::size_t n) {
  return load_idx(kData / "mnist/t10k-images-idx3-ubyte.gz", kData / "mnist/t10k-labels-idx1-ubyte.gz", n);
}

Outcome clock_contract() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream dims(2024);
  for (std::size_t nh = 1; nh <= 64; ++nh) {
    const std::size_t nv = 1 + dims.below(64);
    RbmArray array(nv, nh);
    CdFsm fsm(nv, nh);
    RandomStream rng(derive_seed(1, "clock", nh));
    BitVector v(nv);
    for (std::size_t i = 0; i < nv; ++i) v.set(i, rng.below(2));
    const auto it = run_cd_iteration(fsm, array, v, rng);
    c.require(it.clocks == nh + 3, "n_h=" + std::to_string(nh) + " took " + std::to_string(it.clocks) + " clocks");
  }
  RbmArray small(4, 2);
  CdFsm fsm(4, 2);
  RandomStream rng(0);
  const auto it = run_cd_iteration(fsm, small, BitVector{1, 0, 1, 0}, rng);
  c.require(it.clocks == 5, "4x2 took " + std::to_string(it.clocks) + " clocks");
  const double s = seconds_since(t0);
  c.require(s < 1.0, "took " + fmt("%.3f s", s));
  c.note("n_h+3 clocks for n_h=1..64, 4x2 in 5 clocks, " + fmt("%.3f s", s));
  return c.result();
}

Outcome oracle_equivalence() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  ArrayConfig cfg;
  cfg.use_biases = false;
  RbmArray proto(4, 2, cfg);
  const auto top = proto.grid().max_index();
  RandomStream init(5);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 2; ++j) proto.grid().set_state(i, j, static_cast<SynapseGrid::Index>(init.below(top + 1)));
  }
  proto.grid().set_state(0, 0, 0);
  proto.grid().set_state(3, 1, top);
  const double eta = proto.grid().learning_rate();
  const int step = proto.grid().config().step;
  std::uint64_t mismatches = 0;
  for (std::uint64_t bits = 0; bits < 4096; ++bits) {
    const BitVector v = BitVector::from_uint(bits, 4), h = BitVector::from_uint(bits >> 4, 2);
    const BitVector vb = BitVector::from_uint(bits >> 6, 4), hb = BitVector::from_uint(bits >> 10, 2);
    RbmArray array = proto;
    ScriptedArray scripted(array, h, vb, hb);
    CdFsm fsm(4, 2);
    RandomStream rng(0);
    run_cd_iteration(fsm, scripted, v, rng);
    const auto dw = oracle::cd_delta(v, h, vb, hb, eta);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const long d0 = proto.grid().state(i, j);
        const long expected = std::clamp<long>(d0 + step * std::lround(dw[i * 2 + j] / eta), 0, top);
        if (array.grid().state(i, j) != expected) ++mismatches;
      }
    }
  }
  const double s = seconds_since(t0);
  c.require(mismatches == 0, std::to_string(mismatches) + " cell mismatches");
  c.require(s < 10.0, "took " + fmt("%.3f s", s));
  c.note("4096 assignments x 8 cells exact, " + fmt("%.3f s", s));
  return c.result();
}

Outcome worked_example() {
  Check c;
  ArrayConfig cfg;
  cfg.use_biases = false;
  RbmArray array(4, 2, cfg);
  const auto before = array.grid().states();
  ScriptedArray scripted(array, BitVector::from_register_string("01"), BitVector::from_register_string("0100"),
                         BitVector::from_register_string("10"));
  CdFsm fsm(4, 2);
  RandomStream rng(0);
  const auto it = run_cd_iteration(fsm, scripted, BitVector::from_register_string("0101"), rng);
  c.require(it.clocks == 5, "not five clocks");
  const auto& u0 = it.records[3].frame;
  const auto& u1 = it.records[4].frame;
  // Vectors are listed by row index: element 0 is row 0.
  c.require(u0.bl == BitVector{1, 0, 1, 0} && u0.sl == BitVector{0, 0, 0, 0} && u0.wwl == BitVector{1, 0},
            "update clock 0 lines differ");
  // Row 2 carries the decrease: v_bar = 4'b0100 has only bit 2 set.
  c.require(u1.bl == BitVector{0, 0, 0, 0} && u1.sl == BitVector{0, 0, 1, 0} && u1.wwl == BitVector{0, 1},
            "update clock 1 lines differ");
  const int step = array.grid().config().step;
  const int expected[4][2] = {{step, 0}, {0, 0}, {step, -step}, {0, 0}};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      c.require(int{array.grid().state(i, j)} - int{before[i * 2 + j]} == expected[i][j],
                "w" + std::to_string(i) + std::to_string(j) + " changed wrongly");
    }
  }
  c.note("BL 1010/0000, SL 0000/0010 by row; w00 +, w20 +, w21 -, others unchanged");
  return c.result();
}

Outcome boltzmann() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  RbmArray array(3, 2);
  auto& g = array.grid();
  RandomStream init(derive_seed(1, "boltzmann-weights", 0));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) g.set_state(i, j, static_cast<SynapseGrid::Index>(init.below(g.levels())));
  }
  for (std::size_t i = 0; i < 3; ++i) g.set_visible_bias_state(i, static_cast<SynapseGrid::Index>(init.below(g.levels())));
  for (std::size_t j = 0; j < 2; ++j) g.set_hidden_bias_state(j, static_cast<SynapseGrid::Index>(init.below(g.levels())));
  RandomStream rng(derive_seed(1, "boltzmann-gibbs", 0));
  const auto freq = oracle::gibbs_joint_frequencies(array, 1'000'000, rng);
  const double tv = oracle::total_variation(freq, oracle::exact_distribution(oracle::dense_from_array(array)));
  const double s = seconds_since(t0);
  c.require(tv < 0.02, "TV distance " + fmt("%.5f", tv));
  c.require(s < 60.0, "took " + fmt("%.1f s", s));
  c.note("TV distance " + fmt("%.5f", tv) + " after 10^6 sweeps, " + fmt("%.2f s", s));
  return c.result();
}

Outcome sigmoid_fidelity() {
  Check c;
  RandomStream rng(derive_seed(1, "sigmoid", 0));
  std::size_t units = 0;
  double worst = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t nv = 1 + rng.below(6), nh = 1 + rng.below(4);
    ArrayConfig cfg;
    cfg.input_scale = 0.5 + 2.0 * rng.uniform();
    RbmArray array(nv, nh, cfg);
    auto& g = array.grid();
    for (std::size_t i = 0; i < nv; ++i) {
      for (std::size_t j = 0; j < nh; ++j) g.set_state(i, j, static_cast<SynapseGrid::Index>(rng.below(g.levels())));
    }
    for (std::size_t j = 0; j < nh; ++j) g.set_hidden_bias_state(j, static_cast<SynapseGrid::Index>(rng.below(g.levels())));
    BitVector v(nv);
    for (std::size_t i = 0; i < nv; ++i) v.set(i, rng.below(2));
    const auto p = array.probabilities_forward(v);
    std::vector<std::uint64_t> ones(nh, 0);
    RandomStream sampler(derive_seed(1, "sigmoid-samples", inst));
    constexpr int kSamples = 100'000;
    for (int s = 0; s < kSamples; ++s) {
      const BitVector h = array.forward(v, sampler);
      for (std::size_t j = 0; j < nh; ++j) ones[j] += h[j];
    }
    for (std::size_t j = 0; j < nh; ++j) {
      // Analytic value straight from the weights, independent of the array's own helper.
      double net = g.hidden_bias(j);
      for (std::size_t i = 0; i < nv; ++i) net += v[i] * g.weight(i, j);
      const double analytic = 1.0 / (1.0 + std::exp(-cfg.input_scale * net));
      c.require(std::abs(analytic - p[j]) < 1e-12, "probabilities_forward disagrees with the sigmoid");
      const double sigma = std::sqrt(analytic * (1 - analytic) / kSamples);
      const double dev = std::abs(double(ones[j]) / kSamples - analytic);
      const double z = sigma > 0 ? dev / sigma : (dev == 0 ? 0 : INFINITY);
      worst = std::max(worst, z);
      c.require(z <= 3.0, "instance " + std::to_string(inst) + " unit " + std::to_string(j) + " off by " +
                              fmt("%.2f sigma", z));
      ++units;
    }
  }
  c.note(std::to_string(units) + " units in 20 instances, worst deviation " + fmt("%.2f sigma", worst));
  return c.result();
}

Outcome power_reproduction() {
  Check c;
  const std::pair<const char*, double> reported[] = {
      {"784x10", 0.32}, {"784x500x10", 14.2}, {"784x800x10", 19.3}, {"784x500x500x10", 25.3}, {"784x800x800x10", 34.5}};
  double worst = 0, min_reduction = 1;
  for (const auto& [name, mw] : reported) {
    const Topology t = Topology::parse(name);
    const double sram = power::topology_power(t, power::Technology::Sram);
    const double she = power::topology_power(t, power::Technology::SheMtj);
    const double rel = std::abs(sram - mw) / mw;
    worst = std::max(worst, rel);
    min_reduction = std::min(min_reduction, 1.0 - she / sram);
    c.require(rel <= 0.15, std::string(name) + ": " + fmt("%.3f mW", sram));
    c.require(1.0 - she / sram >= 0.80, std::string(name) + ": SHE-MTJ saving below 80%");
  }
  const double mos = power::mos_reduction();
  c.require(std::abs(mos - 0.514) < 0.0005 && mos >= 0.50, "MOS reduction " + fmt("%.4f", mos));
  c.note("worst power error " + fmt("%.2f%%", 100 * worst) + ", min SHE-MTJ saving " +
         fmt("%.1f%%", 100 * min_reduction) + ", MOS reduction " + fmt("%.1f%%", 100 * mos));
  return c.result();
}

Outcome mnist() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto train = mnist_train(1000);
  const auto test = mnist_test(1000);
  c.require(train.size() == 1000 && test.size() == 1000, "bundled MNIST subset too small");
  if (!c.result().pass) return c.result();

  DbnModel model(Topology({784, 10}), {}, 1);
  greedy_train(model, train, 1);
  const double err = error_rate(model, test, 4);
  c.require(err <= 0.5, "784x10 error " + fmt("%.4f", err));

  double mean_small = 0, mean_full = 0;
  const auto ten = train.head(10);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DbnModel a(Topology({784, 10}), {}, seed), b(Topology({784, 10}), {}, seed);
    greedy_train(a, ten, 1);
    greedy_train(b, train, 1);
    mean_small += error_rate(a, test, 4) / 5;
    mean_full += error_rate(b, test, 4) / 5;
  }
  c.require(mean_full < mean_small,
            "mean error with 1000 samples " + fmt("%.4f", mean_full) + " not below " + fmt("%.4f", mean_small));
  const double s = seconds_since(t0);
  c.require(s < 300.0, "took " + fmt("%.1f s", s));
  c.note("error " + fmt("%.4f", err) + "; 5-seed mean " + fmt("%.4f", mean_full) + " (1000 samples) vs " +
         fmt("%.4f", mean_small) + " (10 samples), " + fmt("%.1f s", s));
  return c.result();
}

Outcome synthetic() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto train = synthetic_orthogonal(16, 4, 200, 0.0, derive_seed(1, "synthetic", 0));
  const auto test = synthetic_orthogonal(16, 4, 100, 0.0, derive_seed(1, "synthetic", 1));
  DbnModel model(Topology({16, 4}), {}, 1);
  greedy_train(model, train, 1);
  const double acc = 1.0 - error_rate(model, test);
  const double s = seconds_since(t0);
  c.require(acc >= 0.90, "accuracy " + fmt("%.3f", acc));
  c.require(s < 10.0, "took " + fmt("%.2f s", s));
  c.note("accuracy " + fmt("%.3f", acc) + " after 200 iterations per pattern, " + fmt("%.3f s", s));
  return c.result();
}

Outcome golden_vcd() {
  Check c;
  std::ostringstream out, err;
  const int code = cli::run_cli({"trace", "--visible", "4", "--hidden", "2", "--v", "0101", "--h", "01", "--vbar", "0100",
                                 "--hbar", "10"},
                                out, err);
  c.require(code == 0, "trace exited " + std::to_string(code) + ": " + err.str());
  std::ifstream in(kGolden / "worked_example.vcd", std::ios::binary);
  std::stringstream golden;
  golden << in.rdbuf();
  c.require(!golden.str().empty(), "golden file missing");
  c.require(out.str() == golden.str(), "trace output differs from golden file");

  RbmArray array(4, 2);
  ScriptedArray scripted(array, BitVector::from_register_string("01"), BitVector::from_register_string("0100"),
                         BitVector::from_register_string("10"));
  CdFsm fsm(4, 2);
  RandomStream rng(0);
  const auto it = run_cd_iteration(fsm, scripted, BitVector::from_register_string("0101"), rng);
  const auto back = trace::records_from_vcd(trace::parse_vcd(golden.str()));
  c.require(back.size() == it.records.size(), "round trip lost clocks");
  for (std::size_t k = 0; k < std::min(back.size(), it.records.size()); ++k) {
    c.require(back[k].state == it.records[k].state && back[k].counter == it.records[k].counter &&
                  back[k].frame == it.records[k].frame,
              "round trip differs at clock " + std::to_string(k));
  }
  c.note("byte-identical, " + std::to_string(back.size()) + " clocks recovered by the parser");
  return c.result();
}

Outcome persistence() {
  Check c;
  const auto train = mnist_train(300);
  const auto test = mnist_test(1000);
  DbnModel model(Topology({784, 50, 10}), {}, 3);
  greedy_train(model, train, 1);
  const fs::path path = fs::temp_directory_path() / "snra_acceptance_model.snra";
  save_model(model, path);
  const DbnModel loaded = load_model(path);
  fs::remove(path);
  c.require(loaded == model, "loaded model differs");
  c.require(serialize_model(loaded) == serialize_model(model), "re-serialized bytes differ");
  std::size_t same = 0;
  for (std::size_t s = 0; s < test.size(); ++s) same += predict(model, test.images[s], s) == predict(loaded, test.images[s], s);
  c.require(same == test.size(), std::to_string(test.size() - same) + " predictions changed");
  c.note("784x50x10 model, " + std::to_string(same) + "/" + std::to_string(test.size()) + " predictions identical");
  return c.result();
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"clock contract", clock_contract},
      {"FSM/oracle equivalence", oracle_equivalence},
      {"worked example", worked_example},
      {"Boltzmann convergence", boltzmann},
      {"sigmoid fidelity", sigmoid_fidelity},
      {"power reproduction", power_reproduction},
      {"MNIST desk scale", mnist},
      {"synthetic classification", synthetic},
      {"golden VCD", golden_vcd},
      {"persistence", persistence},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
