#include "gwd/fields.hpp"

namespace gwd {

TrigField3 random_trig_field(std::mt19937_64& rng, double amplitude,
                             double k_max, int n_waves) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  TrigField3 f;
  f.waves.resize(n_waves);
  double total = 0.0;
  for (auto& w : f.waves) {
    w.amp = 0.2 + std::abs(unit(rng));
    w.k_theta = k_max * unit(rng);
    w.k_eta = k_max * unit(rng);
    w.k_v = k_max * unit(rng);
    w.phase = angle(rng);
    total += w.amp;
  }
  for (auto& w : f.waves) w.amp *= amplitude / total;
  return f;
}

}  // namespace gwd
