// Temporary numeric probe (not installed): prints reference quantities.
#include "spincav/dicke.hpp"

#include <cstdio>

using namespace spincav;

int main() {
  DickeConfig cfg;
  cfg.g_c = 57.35;
  cfg.spin = {3.5, 1.991, 1.992};
  cfg.cf = {-945.66, -1.2435, -25.3, 5.712e-4, 70.0e-4};
  cfg.zeeman = {72.0, 81.66, 0.0};
  cfg.cavity = {17930.7, 10.485, 10.38, 1};
  cfg.temperature = 0.38;

  // spin-only spectrum at 72 G
  auto spin_es = diagonalize(spin_hamiltonian(cfg.spin, cfg.cf, cfg.zeeman));
  std::printf("spin levels (MHz, rel ground):\n");
  for (int k = 0; k < spin_es.energies.size(); ++k) {
    std::printf("  e%d = %.4f\n", k,
                spin_es.energies(k) - spin_es.energies(0));
  }
  std::printf("E2-E1 (spin doublet) = %.4f MHz\n",
              spin_es.energies(1) - spin_es.energies(0));
  std::printf("omega_s (e2-e1) = %.4f MHz vs omega_c = %.4f\n",
              spin_es.energies(2) - spin_es.energies(1), cfg.cavity.omega_c);
  std::printf("<e2|Sx|e1> = %.5f  <e2|Sz|e1> = %.5f  <e2|Sy|e1> = %.5f\n",
              matrix_element(spin_es, 1, 2, Axis::x),
              matrix_element(spin_es, 1, 2, Axis::z),
              matrix_element(spin_es, 1, 2, Axis::y));

  // Dicke spectrum at 72 G
  auto es = diagonalize(dicke_hamiltonian(cfg), cfg.cavity.n_max + 1);
  std::printf("\nDicke levels rel E1 (MHz): ");
  for (int k = 0; k < 8; ++k) {
    std::printf("%.2f ", es.energies(k) - es.energies(0));
  }
  std::printf("\nE5-E4 = %.4f MHz\n", es.energies(4) - es.energies(3));
  std::printf("E2-E1 = %.4f MHz\n", es.energies(1) - es.energies(0));
  std::printf("E4-E2 = %.4f MHz (drive freq)\n",
              es.energies(3) - es.energies(1));

  // Table 1 style eigenvectors |3>,|4>,|5> (indices 2,3,4)
  for (int k = 2; k <= 4; ++k) {
    std::printf("state %d:\n", k + 1);
    for (int n = 0; n < 2; ++n) {
      std::printf("  n=%d: ", n);
      for (int m = 0; m < 8; ++m) {
        std::printf("% .3f ", es.states(n * 8 + m, k).real());
      }
      std::printf("\n");
    }
  }

  // amplitudes
  std::printf("A12=%.6e A24=%.6e A25=%.6e A41=%.6e A23=%.6e\n",
              transition_amplitude(es, 0, 1, 0.38),
              transition_amplitude(es, 1, 3, 0.38),
              transition_amplitude(es, 1, 4, 0.38),
              transition_amplitude(es, 3, 0, 0.38),
              transition_amplitude(es, 1, 2, 0.38));

  // minimum splitting scan
  double best_h = 0, best_gap = 1e99;
  for (double h = 40; h <= 110; h += 0.5) {
    DickeConfig local = cfg;
    local.zeeman.h0 = h;
    auto e = diagonalize(dicke_hamiltonian(local), 2);
    const double gap = e.energies(4) - e.energies(3);
    if (gap < best_gap) {
      best_gap = gap;
      best_h = h;
    }
  }
  std::printf("min E5-E4 = %.3f MHz at H = %.1f G\n", best_gap, best_h);

  // ground-state perturbation, H0 = 0
  DickeConfig zero = cfg;
  zero.zeeman.h0 = 0.0;
  {
    Eigen::VectorXd grid(2);
    grid << 0.0, -25.3;
    auto rows_gc0 = [&] {
      DickeConfig c2 = zero;
      c2.g_c = 0.0;
      return ground_state_perturbation_scan(c2, ScanVar::b44, grid);
    }();
    std::printf("\nB44 scan shift at gc=0:    %.3f MHz\n", rows_gc0[1].shift_mhz);
    auto rows_gc = ground_state_perturbation_scan(zero, ScanVar::b44, grid);
    std::printf("B44 scan shift at gc=57.35: %.3f MHz\n", rows_gc[1].shift_mhz);

    Eigen::VectorXd ggrid(2);
    ggrid << 0.0, 57.35;
    auto rows2 = ground_state_perturbation_scan(zero, ScanVar::gc, ggrid);
    std::printf("gc scan (E3-E1)-wc at gc=57.35: %.3f MHz\n", rows2[1].shift_mhz);

    auto zero_es = diagonalize(spin_hamiltonian(zero.spin, zero.cf, zero.zeeman));
    std::printf("zero-field spin gaps rel ground: ");
    for (int k = 0; k < 8; ++k) std::printf("%.2f ", zero_es.energies(k) - zero_es.energies(0));
    std::printf("\n");
  }

  // nMax convergence at the resonance point
  {
    DickeConfig n2 = cfg;
    n2.cavity.n_max = 2;
    auto es2 = diagonalize(dicke_hamiltonian(n2), 3);
    std::printf("nMax 1->2: dE4 = %.4f, dE5 = %.4f MHz\n",
                (es2.energies(3) - es2.energies(0)) -
                    (es.energies(3) - es.energies(0)),
                (es2.energies(4) - es2.energies(0)) -
                    (es.energies(4) - es.energies(0)));
  }
  return 0;
}
