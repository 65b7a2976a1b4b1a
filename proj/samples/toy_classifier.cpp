// Trains a 16x4 label-clamped RBM on four block patterns and reports accuracy.

#include <cstdio>

#include "snra/snra.hpp"

int main() {
  using namespace snra;

  const LabeledBitSet train = synthetic_orthogonal(16, 4, 200, 0.0, 7);
  DbnModel model(Topology({16, 4}), DeviceConfig{}, 42);
  const TrainingReport report = greedy_train(model, train, 1);
  const LabeledBitSet test = synthetic_orthogonal(16, 4, 1, 0.0, 0);
  std::printf("clocks %llu, accuracy %.2f\n", static_cast<unsigned long long>(report.total_clocks()),
              1.0 - error_rate(model, test));
}
