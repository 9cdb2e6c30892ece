#include "bloch/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bloch/errors.hpp"

namespace bloch {

const char* ambiguity_name(Ambiguity a) {
  switch (a) {
    case Ambiguity::unique: return "unique";
    case Ambiguity::plus_minus_pair: return "plus_minus_pair";
    case Ambiguity::q_mod_z_family: return "q_mod_z_family";
  }
  return "unknown";
}

namespace {

template <typename F>
auto staged(Stage stage, F&& f) {
  try {
    return f();
  } catch (const staged_error&) {
    throw;
  } catch (const error& e) {
    throw staged_error(stage, e.what());
  }
}

// smallest positive gap between measured Chern-Simons values; 0 when
// fewer than two distinct values were observed
double measure_modulus(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double best = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double gap = values[i] - values[i - 1];
    if (gap > 1e-9 && (best == 0.0 || gap < best)) best = gap;
  }
  return best;
}

std::string fmt(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

InvariantReport compute_report(const IdealTriangulation& tri,
                               const ReportOptions& opts) {
  InvariantReport r;
  r.name = tri.name;
  r.n_tet = tri.n_tet;
  r.warnings = tri.warnings;
  r.cusped = !tri.cusps.empty();

  const ShapeAssignment s = staged(Stage::solve, [&] {
    try {
      return solve_shapes(tri, opts.initial, opts.solve);
    } catch (const error& e) {
      throw error("solve_shapes: " + std::string(e.what()));
    }
  });
  r.shapes = s.shapes;
  r.residual = s.residual;

  const BlochInvariantResult inv = staged(Stage::invariant, [&] {
    try {
      return bloch_invariant(tri, s);
    } catch (const error& e) {
      throw error("bloch_invariant: " + std::string(e.what()));
    }
  });
  r.certificate = inv.certificate;
  r.volume = staged(Stage::invariant, [&] { return volume(inv.element); });
  r.borel_regulator =
      staged(Stage::invariant, [&] { return borel_regulator(inv.element); });
  r.bloch_defect = staged(Stage::invariant, [&] {
    return bloch_defect(inv.element, opts.shift_bound);
  });

  const std::vector<FlatteningAssignment> flats = staged(Stage::flattening, [&] {
    try {
      return flattenings_search(tri, s, opts.flattening_bound);
    } catch (const error& e) {
      throw error("flattenings_search: " + std::string(e.what()));
    }
  });
  r.flattening = flats.front();

  staged(Stage::regulator, [&] {
    try {
      r.mu = mu_regulator_shapes(s.shapes, r.flattening);
      r.cs = -two_pi_squared * r.mu.real();
      std::vector<double> cs_values;
      cs_values.reserve(flats.size());
      for (const auto& f : flats) {
        cs_values.push_back(-two_pi_squared *
                            mu_regulator_shapes(s.shapes, f).real());
      }
      r.cs_ambiguity = measure_modulus(std::move(cs_values));
      std::ostringstream note;
      if (r.cs_ambiguity > 0.0) {
        note << "cs defined modulo " << fmt(r.cs_ambiguity, 15)
             << " (lattice measured across " << flats.size()
             << " flattenings, ~" << fmt(r.cs_ambiguity / pi_squared, 6)
             << " * pi^2)";
      } else {
        note << "single flattening observed; ambiguity lattice not measured";
      }
      r.cs_note = note.str();
      return 0;
    } catch (const error& e) {
      throw error("mu_regulator: " + std::string(e.what()));
    }
  });

  if (r.cusped) {
    r.ambiguity = Ambiguity::plus_minus_pair;
    r.ambiguity_note =
        "cusped: two natural lifts, reduced from a Q/Z family by the "
        "(-1)-eigenspace choice";
  } else {
    r.ambiguity = Ambiguity::unique;
    r.ambiguity_note = "closed: the class is determined by the Spin-structure";
  }
  return r;
}

std::string report_to_json(const InvariantReport& r, int precision) {
  std::ostringstream os;
  const auto f = [&](double x) { return fmt(x, precision); };
  os << "{\n";
  os << "  \"format_version\": 1,\n";
  os << "  \"name\": \"" << json_escape(r.name) << "\",\n";
  os << "  \"n_tet\": " << r.n_tet << ",\n";
  os << "  \"shapes\": [";
  for (std::size_t i = 0; i < r.shapes.size(); ++i) {
    if (i) os << ", ";
    os << "{\"re\": " << f(r.shapes[i].real())
       << ", \"im\": " << f(r.shapes[i].imag()) << "}";
  }
  os << "],\n";
  os << "  \"residual\": " << f(r.residual) << ",\n";
  os << "  \"volume\": " << f(r.volume) << ",\n";
  os << "  \"borel_regulator\": " << f(r.borel_regulator) << ",\n";
  os << "  \"mu\": {\"re\": " << f(r.mu.real())
     << ", \"im\": " << f(r.mu.imag()) << "},\n";
  os << "  \"cs\": " << f(r.cs) << ",\n";
  os << "  \"cs_ambiguity\": " << f(r.cs_ambiguity) << ",\n";
  os << "  \"cs_note\": \"" << json_escape(r.cs_note) << "\",\n";
  os << "  \"bloch_defect\": " << f(r.bloch_defect) << ",\n";
  os << "  \"certificate\": " << (r.certificate ? "true" : "false") << ",\n";
  os << "  \"cusped\": " << (r.cusped ? "true" : "false") << ",\n";
  os << "  \"ambiguity\": \"" << ambiguity_name(r.ambiguity) << "\",\n";
  os << "  \"ambiguity_note\": \"" << json_escape(r.ambiguity_note) << "\",\n";
  os << "  \"flattening\": {\"p\": [";
  for (std::size_t i = 0; i < r.flattening.size(); ++i) {
    if (i) os << ", ";
    os << r.flattening[i].p;
  }
  os << "], \"q\": [";
  for (std::size_t i = 0; i < r.flattening.size(); ++i) {
    if (i) os << ", ";
    os << r.flattening[i].q;
  }
  os << "]},\n";
  os << "  \"warnings\": [";
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    if (i) os << ", ";
    os << "\"" << json_escape(r.warnings[i]) << "\"";
  }
  os << "]\n";
  os << "}\n";
  return os.str();
}

std::string report_to_text(const InvariantReport& r, int precision) {
  std::ostringstream os;
  const auto f = [&](double x) { return fmt(x, precision); };
  os << "name:            " << r.name << "\n";
  os << "n_tet:           " << r.n_tet << "\n";
  os << "shapes:         ";
  for (const Complex& z : r.shapes) {
    os << " " << f(z.real()) << (z.imag() < 0 ? "-" : "+")
       << f(std::abs(z.imag())) << "i";
  }
  os << "\n";
  os << "residual:        " << f(r.residual) << "\n";
  os << "volume:          " << f(r.volume) << "\n";
  os << "borel_regulator: " << f(r.borel_regulator) << "\n";
  os << "mu:              " << f(r.mu.real()) << (r.mu.imag() < 0 ? "-" : "+")
     << f(std::abs(r.mu.imag())) << "i\n";
  os << "cs:              " << f(r.cs) << "\n";
  os << "cs_ambiguity:    " << f(r.cs_ambiguity) << "\n";
  os << "cs_note:         " << r.cs_note << "\n";
  os << "bloch_defect:    " << f(r.bloch_defect) << "\n";
  os << "certificate:     " << (r.certificate ? "true" : "false") << "\n";
  os << "cusped:          " << (r.cusped ? "true" : "false") << "\n";
  os << "ambiguity:       " << ambiguity_name(r.ambiguity) << "\n";
  os << "ambiguity_note:  " << r.ambiguity_note << "\n";
  os << "flattening:      p=[";
  for (std::size_t i = 0; i < r.flattening.size(); ++i) {
    if (i) os << ",";
    os << r.flattening[i].p;
  }
  os << "] q=[";
  for (std::size_t i = 0; i < r.flattening.size(); ++i) {
    if (i) os << ",";
    os << r.flattening[i].q;
  }
  os << "]\n";
  for (const auto& w : r.warnings) os << "warning:         " << w << "\n";
  return os.str();
}

std::string DiffSummary::to_string() const {
  if (entries.empty()) return "reports agree\n";
  std::ostringstream os;
  for (const auto& e : entries) {
    os << e.field << ": |delta| = " << fmt(e.delta, 15) << "\n";
  }
  return os.str();
}

DiffSummary compare_reports(const InvariantReport& a, const InvariantReport& b,
                            double tol) {
  DiffSummary out;
  const auto push = [&](const std::string& field, double delta) {
    if (delta > tol) out.entries.push_back({field, delta});
  };

  push("n_tet", std::abs(static_cast<double>(a.n_tet - b.n_tet)));
  push("volume", std::abs(a.volume - b.volume));
  push("borel_regulator", std::abs(a.borel_regulator - b.borel_regulator));
  push("bloch_defect", std::abs(a.bloch_defect - b.bloch_defect));
  push("certificate",
       a.certificate == b.certificate ? 0.0 : 1.0);
  push("ambiguity", a.ambiguity == b.ambiguity ? 0.0 : 1.0);

  // cs compared modulo the ambiguity lattice
  const double modulus = std::max(a.cs_ambiguity, b.cs_ambiguity);
  double cs_delta = std::abs(a.cs - b.cs);
  if (modulus > 0.0) {
    cs_delta = std::abs(cs_delta - modulus * std::round(cs_delta / modulus));
  }
  push("cs", cs_delta);

  if (a.shapes.size() != b.shapes.size()) {
    push("shapes", std::abs(static_cast<double>(a.shapes.size()) -
                            static_cast<double>(b.shapes.size())));
  } else {
    auto key = [](const Complex& x, const Complex& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    };
    std::vector<Complex> sa = a.shapes;
    std::vector<Complex> sb = b.shapes;
    std::sort(sa.begin(), sa.end(), key);
    std::sort(sb.begin(), sb.end(), key);
    double worst = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      worst = std::max(worst, std::abs(sa[i] - sb[i]));
    }
    push("shapes", worst);
  }
  return out;
}

}  // namespace bloch
