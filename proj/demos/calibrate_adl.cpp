// Diamond-norm calibration of the correction rate against the ADL averaged
// map, followed by a short side-by-side run.

#include "ctqec/ctqec.hpp"

#include <cstdio>

int main() {
  using namespace ctqec;
  ADLMap adl;
  adl.kappa2 = 64.0;
  adl.gamma2 = 128.0;
  const auto cal = calibrate_kappa(adl);
  std::printf("||G_ADL|| = %.4f, kappa = %.3f (%.4f kappa2)\n", cal.adl_norm, cal.kappa, cal.ratio);

  StepOptions opt;
  opt.samples_per_unit = 50;
  const auto tr = compare_with_adl(adl, 1.0, cal.kappa, 0.1, 1e-5, opt);
  std::printf("%6s %12s %12s %12s %12s\n", "t", "F ours", "F adl", "P ours", "P adl");
  for (std::size_t i = 0; i < tr.ours.size(); ++i)
    std::printf("%6.3f %12.8f %12.8f %12.8f %12.8f\n", tr.ours.times[i], tr.ours.codeword_fidelity[i],
                tr.adl.codeword_fidelity[i], tr.ours.correctable_overlap[i], tr.adl.correctable_overlap[i]);
}
