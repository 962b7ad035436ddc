#include "cqed/lindblad/weak_drive.hpp"

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed::lindblad {

using constants::pi;
using constants::two_pi;

WeakDriveResult weak_drive_analytic(const SystemParams& p) {
  p.validate();
  if (!p.weak_drive()) throw ValidationError("weak-drive formula requires xi / (2 pi kappa) below threshold");
  const std::complex<double> i(0.0, 1.0);
  const double G = two_pi * p.g;
  const double k = two_pi * p.kappa;
  const double gam = two_pi * p.gamma;
  const double gamma2 = pi * (p.gamma + p.gamma_dp);
  const std::complex<double> emitter_den = gamma2 + i * (two_pi * p.delta_e);
  const std::complex<double> alpha = p.xi / (0.5 * k + i * (two_pi * p.delta_c) + G * G / emitter_den);
  const std::complex<double> s = G * alpha / emitter_den;

  WeakDriveResult r;
  r.amplitude = alpha;
  r.emitter = s;
  r.coherent_photons = std::norm(alpha);

  if (p.g == 0.0) {
    r.photons = r.coherent_photons;
    r.excited = 0.0;
  } else {
    // unknowns x = (n, p, Re c, Im c), c = <a^dag sigma>
    //   k n + 2G Re c            = 2 xi Re alpha
    //   gam p - 2G Re c          = 0
    //   D c - G n + G p          = xi s,  D = k/2 + gamma2 + i 2pi (De - Dc)
    if (!(gam > 0.0)) throw ValidationError("weak-drive moments need gamma > 0 when g > 0");
    const std::complex<double> D = 0.5 * k + gamma2 + i * (two_pi * (p.delta_e - p.delta_c));
    const std::complex<double> rhs = p.xi * s;
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    Eigen::Vector4d b;
    A(0, 0) = k;
    A(0, 2) = 2.0 * G;
    b(0) = 2.0 * p.xi * alpha.real();
    A(1, 1) = gam;
    A(1, 2) = -2.0 * G;
    b(1) = 0.0;
    A(2, 0) = -G;
    A(2, 1) = G;
    A(2, 2) = D.real();
    A(2, 3) = -D.imag();
    b(2) = rhs.real();
    A(3, 2) = D.imag();
    A(3, 3) = D.real();
    b(3) = rhs.imag();
    const Eigen::Vector4d x = A.fullPivLu().solve(b);
    r.photons = x(0);
    r.excited = x(1);
  }
  if (p.xi > 0.0) {
    const double scale = two_pi * p.kappa_in * two_pi * p.kappa_out / (p.xi * p.xi);
    r.transmission = scale * r.photons;
    r.coherent_transmission = scale * r.coherent_photons;
  }
  return r;
}

}  // namespace cqed::lindblad
