// Replays the 4x2 update example through the controller and prints each
// clock's control lines and the resulting weight indices.

#include <cstdio>

#include "snra/snra.hpp"

int main() {
  using namespace snra;

  RbmArray array(4, 2);
  const auto before = array.grid().states();
  ScriptedArray scripted(array, BitVector::from_register_string("01"), BitVector::from_register_string("0100"),
                         BitVector::from_register_string("10"));
  CdFsm fsm(4, 2);
  RandomStream rng(0);
  const CdIteration it = run_cd_iteration(fsm, scripted, BitVector::from_register_string("0101"), rng);

  for (const auto& r : it.records) {
    const auto& f = r.frame;
    std::printf("%-12s counter=%zu RWL=%d WWL=%s BL=%s SL=%s\n", std::string(to_string(r.state)).c_str(), r.counter,
                f.rwl ? 1 : 0, f.wwl.to_register_string().c_str(),
                f.phase == Phase::Read ? "zzzz" : f.bl.to_register_string().c_str(),
                f.phase == Phase::Read ? "zzzz" : f.sl.to_register_string().c_str());
  }
  std::printf("%llu clocks\n", static_cast<unsigned long long>(it.clocks));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const int delta = int{array.grid().state(i, j)} - int{before[i * 2 + j]};
      if (delta != 0) std::printf("w%zu%zu %+d\n", i, j, delta);
    }
  }
}
