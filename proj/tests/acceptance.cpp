// Acceptance suite. Each numbered criterion prints one PASS/FAIL line;
// the process exits nonzero if any fails. Expected values come from the
// independent oracles in oracles.hpp, never from the library itself.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bloch/dilog.hpp"
#include "bloch/errors.hpp"
#include "bloch/homology.hpp"
#include "bloch/invariants.hpp"
#include "bloch/prebloch.hpp"
#include "bloch/triangulation.hpp"
#include "oracles.hpp"

using bloch::Complex;
using bloch::pi;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const char* label, bool ok,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              label, detail.c_str());
  if (!ok) ++failures;
}

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(BLOCHINV_FIXTURE_DIR) + "/" + name);
  if (!in.good()) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// -------------------------------------------------------------------------

void criterion_1_figure_eight() {
  const auto t0 = Clock::now();
  const auto tri = bloch::parse_triangulation(fixture("figure_eight.json"));
  const auto rep = bloch::compute_report(tri);
  const double elapsed = seconds_since(t0);

  const Complex regular = std::polar(1.0, pi / 3);
  double shape_err = 0.0;
  for (const Complex& z : rep.shapes) {
    shape_err = std::max(shape_err, std::abs(z - regular));
  }
  const double vol_oracle = 2.0 * oracles::clausen_cl2(pi / 3);
  const double vol_err = std::abs(rep.volume - vol_oracle);
  const bool borel_exact =
      rep.borel_regulator * bloch::two_pi_squared == rep.volume &&
      rep.borel_regulator == rep.volume / bloch::two_pi_squared;

  // extended-precision rerun of the volume sum as headroom evidence
  long double vol_ext = 0.0L;
  for (const Complex& z : rep.shapes) {
    vol_ext += bloch::bloch_wigner_d_ext({z.real(), z.imag()});
  }
  const double ext_err = std::abs(static_cast<double>(vol_ext) - rep.volume);

  const bool ok = shape_err < 1e-10 && vol_err < 1e-9 && borel_exact &&
                  ext_err < 1e-12 && elapsed < 1.0;
  report(1, "figure-eight end-to-end", ok,
         fmt("shape err %.2e, volume err %.2e (ext recheck %.2e)", shape_err,
             vol_err, ext_err) +
             fmt(", %.3fs", elapsed) +
             (borel_exact ? ", borel*2pi^2 == volume"
                          : ", borel identity BROKEN"));
}

void criterion_2_octahedron() {
  const auto tri = bloch::parse_triangulation(fixture("octahedron_4tet.json"));
  const auto rep = bloch::compute_report(tri);
  const double vol_oracle = 4.0 * oracles::catalan_series();
  const double err = std::abs(rep.volume - vol_oracle);
  report(2, "octahedron volume = 4 x Catalan", err < 1e-9,
         fmt("volume %.15f, err %.2e", rep.volume, err));
}

void criterion_3_chern_simons() {
  const auto tri = bloch::parse_triangulation(fixture("figure_eight.json"));
  const auto rep = bloch::compute_report(tri);

  double cs_resid = std::abs(rep.cs);
  if (rep.cs_ambiguity > 0.0) {
    cs_resid = std::abs(rep.cs - rep.cs_ambiguity *
                                     std::round(rep.cs / rep.cs_ambiguity));
  }
  const double im_err =
      std::abs(rep.mu.imag() * bloch::two_pi_squared - rep.volume);
  const bool ok = cs_resid < 1e-6 && im_err < 1e-9;
  report(3, "figure-eight Chern-Simons", ok,
         fmt("cs residual %.2e (mod %.9f), Im(mu)*2pi^2 - vol = %.2e",
             cs_resid, rep.cs_ambiguity, im_err));
}

void criterion_4_orientation_counts() {
  const auto count = [](const std::string& name) {
    return bloch::count_stable_orientations(
        bloch::homology(bloch::parse_chain_complex(fixture(name))));
  };
  const long s3 = count("s3_complex.json");
  const long t3 = count("t3_complex.json");
  const long rp3 = count("rp3_complex.json");
  const bool ok = s3 == 48 && t3 == 3072 && rp3 == 192;
  report(4, "orientation counts (S3, T3, RP3)", ok,
         "got " + std::to_string(s3) + ", " + std::to_string(t3) + ", " +
             std::to_string(rp3) + "; expected 48, 3072, 192");
}

void criterion_5_property_suites() {
  const auto t0 = Clock::now();
  std::mt19937 rng(987654321);
  std::uniform_real_distribution<double> mod(0.1, 10.0), ang(-pi, pi);
  auto random_point = [&] { return std::polar(mod(rng), ang(rng)); };

  // five-term functional equation of D over 1000 admissible pairs
  double worst_five = 0.0;
  int pairs = 0;
  while (pairs < 1000) {
    const Complex z1 = random_point();
    const Complex z2 = random_point();
    try {
      worst_five = std::max(worst_five, bloch::five_term_defect(z1, z2));
      ++pairs;
    } catch (const bloch::degenerate_configuration_error&) {
    }
  }

  // six-fold symmetry and oddness of D
  double worst_sym = 0.0;
  int points = 0;
  while (points < 500) {
    const Complex z = random_point();
    if (std::abs(z) < 0.05 || std::abs(z - Complex(1.0)) < 0.05 ||
        std::abs(z.imag()) < 1e-3) {
      continue;
    }
    ++points;
    const double d = bloch::bloch_wigner_d(z);
    for (const double other :
         {bloch::bloch_wigner_d(1.0 - 1.0 / z),
          bloch::bloch_wigner_d(1.0 / (1.0 - z)),
          -bloch::bloch_wigner_d(1.0 / z), -bloch::bloch_wigner_d(1.0 - z),
          -bloch::bloch_wigner_d(z / (z - 1.0)),
          -bloch::bloch_wigner_d(std::conj(z))}) {
      worst_sym = std::max(worst_sym, std::abs(other - d));
    }
  }

  // SNF certificate on 500 random matrices up to 8x8, entries in [-9, 9]
  std::uniform_int_distribution<int> dim(0, 8), entry(-9, 9);
  bool snf_ok = true;
  for (int n = 0; n < 500 && snf_ok; ++n) {
    const int r = dim(rng);
    const int c = dim(rng);
    bloch::IntegerMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m.at(i, j) = entry(rng);
    }
    const auto snf = bloch::smith_normal_form(m);
    if (!(snf.u * m * snf.v == snf.d)) snf_ok = false;
    if (r > 0 && abs(bloch::determinant(snf.u)) != 1) snf_ok = false;
    if (c > 0 && abs(bloch::determinant(snf.v)) != 1) snf_ok = false;
    const auto f = snf.invariant_factors();
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      if (f[i + 1] % f[i] != 0) snf_ok = false;
    }
    for (const auto& x : f) {
      if (x <= 0) snf_ok = false;
    }
  }

  // analytic Jacobian vs central finite differences (step 1e-7)
  const auto tri = bloch::parse_triangulation(fixture("figure_eight.json"));
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.2, 1.5);
  double worst_jac = 0.0;
  const double h = 1e-7;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> u(tri.n_tet);
    for (auto& x : u) x = Complex(re(rng), im(rng));
    std::vector<Complex> shapes(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) shapes[j] = std::exp(u[j]);
    const auto jac = bloch::gluing_jacobian(tri, shapes);
    for (std::size_t j = 0; j < u.size(); ++j) {
      auto up = u, dn = u;
      up[j] += h;
      dn[j] -= h;
      std::vector<Complex> sp(u.size()), sm(u.size());
      for (std::size_t t = 0; t < u.size(); ++t) {
        sp[t] = std::exp(up[t]);
        sm[t] = std::exp(dn[t]);
      }
      const auto fp = bloch::gluing_defect(tri, sp);
      const auto fm = bloch::gluing_defect(tri, sm);
      for (std::size_t k = 0; k < fp.size(); ++k) {
        const Complex fd = (fp[k] - fm[k]) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(jac[k][j]));
        worst_jac = std::max(worst_jac, std::abs(fd - jac[k][j]) / scale);
      }
    }
  }

  const double elapsed = seconds_since(t0);
  const bool ok = worst_five < 1e-11 && worst_sym < 1e-12 && snf_ok &&
                  worst_jac < 1e-5 && elapsed < 60.0;
  report(5, "property suites", ok,
         fmt("five-term %.2e, symmetry %.2e, jacobian %.2e", worst_five,
             worst_sym, worst_jac) +
             (snf_ok ? ", snf certificate ok" : ", SNF CERTIFICATE FAILED") +
             fmt(", %.1fs", elapsed));
}

void criterion_6_membership() {
  std::mt19937 rng(13579);
  std::uniform_real_distribution<double> mod(0.1, 10.0), ang(-pi, pi);

  double worst = 0.0;
  int produced = 0;
  while (produced < 200) {
    const Complex z1 = std::polar(mod(rng), ang(rng));
    const Complex z2 = std::polar(mod(rng), ang(rng));
    try {
      const auto ft = bloch::five_term_element(z1, z2);
      worst = std::max(worst, bloch::bloch_defect(ft, 4));
      ++produced;
    } catch (const bloch::degenerate_configuration_error&) {
    }
  }

  bool fixtures_ok = true;
  double fixture_defect = 0.0;
  for (const char* name : {"figure_eight.json", "octahedron_4tet.json"}) {
    const auto tri = bloch::parse_triangulation(fixture(name));
    const auto s = bloch::solve_shapes(tri);
    const auto inv = bloch::bloch_invariant(tri, s);
    if (!inv.certificate) fixtures_ok = false;
    fixture_defect =
        std::max(fixture_defect, bloch::bloch_defect(inv.element, 4));
  }

  const bool ok = worst < 1e-8 && fixtures_ok && fixture_defect < 1e-8;
  report(6, "Bloch-group membership evidence", ok,
         fmt("five-term wedge residual %.2e over 200 elements, certified "
             "fixtures residual %.2e",
             worst, fixture_defect));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  try {
    criterion_1_figure_eight();
    criterion_2_octahedron();
    criterion_3_chern_simons();
    criterion_4_orientation_counts();
    criterion_5_property_suites();
    criterion_6_membership();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d/6 criteria passed in %.1fs\n", 6 - failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
