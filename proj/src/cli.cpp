#include "bloch/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "bloch/errors.hpp"
#include "bloch/homology.hpp"
#include "bloch/invariants.hpp"

namespace bloch::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write file: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string fmt(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
  return buf;
}

int env_precision() {
  const char* env = std::getenv("BLOCHINV_PRECISION");
  if (env == nullptr) return 15;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 6 || v > 30) return 15;
  return static_cast<int>(v);
}

IdealTriangulation load_triangulation(const std::string& path, bool strict) {
  try {
    return parse_triangulation(read_file(path), strict);
  } catch (const staged_error&) {
    throw;
  } catch (const error& e) {
    throw staged_error(Stage::parse, std::string(e.what()) + " [" + path + "]");
  }
}

ChainComplex load_chain_complex(const std::string& path, bool strict) {
  try {
    return parse_chain_complex(read_file(path), strict);
  } catch (const staged_error&) {
    throw;
  } catch (const error& e) {
    throw staged_error(Stage::parse, std::string(e.what()) + " [" + path + "]");
  }
}

std::string homology_to_json(const HomologySummary& h, int) {
  std::ostringstream os;
  os << "{\n  \"format_version\": 1,\n  \"rank\": [";
  for (int i = 0; i < 4; ++i) os << (i ? ", " : "") << h.rank[i];
  os << "],\n  \"torsion\": [";
  for (int i = 0; i < 4; ++i) {
    if (i) os << ", ";
    os << "[";
    for (std::size_t t = 0; t < h.torsion[i].size(); ++t) {
      if (t) os << ", ";
      os << h.torsion[i][t].get_str();
    }
    os << "]";
  }
  os << "],\n  \"mod2_dim\": [";
  for (int i = 0; i < 4; ++i) os << (i ? ", " : "") << h.mod2_dim[i];
  os << "]\n}\n";
  return os.str();
}

std::string homology_to_text(const HomologySummary& h) {
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) {
    os << "H" << i << ": rank " << h.rank[i];
    if (!h.torsion[i].empty()) {
      os << ", torsion";
      for (const auto& t : h.torsion[i]) os << " Z/" << t.get_str();
    }
    os << "\n";
  }
  os << "mod2_dim:";
  for (int i = 0; i < 4; ++i) os << " " << h.mod2_dim[i];
  os << "\n";
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

struct BatchRow {
  std::string csv;
  std::string diagnostic;  // empty on success
};

BatchRow batch_one(const std::string& path, const fs::path& out_dir,
                   const ReportOptions& opts, bool strict, int precision) {
  BatchRow row;
  try {
    const IdealTriangulation tri = load_triangulation(path, strict);
    const InvariantReport rep = compute_report(tri, opts);
    const fs::path out_path =
        out_dir / (fs::path(path).stem().string() + ".report.json");
    write_file_atomic(out_path, report_to_json(rep, precision));
    std::ostringstream os;
    os << csv_field(rep.name) << "," << rep.n_tet << ","
       << fmt(rep.volume, precision) << "," << fmt(rep.borel_regulator, precision)
       << "," << fmt(rep.cs, precision) << "," << fmt(rep.cs_ambiguity, precision)
       << "," << fmt(rep.bloch_defect, precision) << ","
       << (rep.certificate ? "true" : "false") << ","
       << ambiguity_name(rep.ambiguity) << "\n";
    row.csv = os.str();
  } catch (const error& e) {
    row.diagnostic = std::string(e.what()) + " [" + path + "]";
  }
  return row;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bloch invariants of ideal triangulations: volumes, regulators, "
               "Chern-Simons classes, and orientation counts"};
  app.name("blochinv");
  app.require_subcommand(1);

  const int default_precision = env_precision();

  // shared option state
  std::string input;
  std::vector<std::string> inputs;
  std::string out_dir_s;
  std::string format = "text";
  int precision = default_precision;
  bool strict = false;
  bool permissive = false;
  int max_iter = 100;
  int shift_bound = 4;
  int flattening_bound = 4;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--precision", precision,
                    "significant digits in numeric output")
        ->check(CLI::Range(6, 30));
  };

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve the gluing equations for shapes");
  solve_cmd->add_option("input", input, "triangulation JSON file")->required();
  add_format(solve_cmd);
  solve_cmd->add_flag("--strict", strict, "reject unknown JSON fields");
  solve_cmd->add_flag("--permissive", permissive,
                      "accept flat or negatively oriented solutions");
  solve_cmd->add_option("--max-iter", max_iter, "Newton iteration cap")
      ->check(CLI::PositiveNumber);

  CLI::App* inv_cmd = app.add_subcommand(
      "invariants", "full report: volume, regulators, Chern-Simons");
  inv_cmd->add_option("input", input, "triangulation JSON file")->required();
  add_format(inv_cmd);
  inv_cmd->add_flag("--strict", strict, "reject unknown JSON fields");
  inv_cmd->add_flag("--permissive", permissive,
                    "accept flat or negatively oriented solutions");
  inv_cmd->add_option("--shift-bound", shift_bound,
                      "branch-shift box for the membership residual")
      ->check(CLI::NonNegativeNumber);
  inv_cmd->add_option("--flattening-bound", flattening_bound,
                      "search box for flattenings")
      ->check(CLI::NonNegativeNumber);

  CLI::App* check_cmd = app.add_subcommand(
      "check-bloch", "membership evidence: gluing certificate and wedge residual");
  check_cmd->add_option("input", input, "triangulation JSON file")->required();
  add_format(check_cmd);
  check_cmd->add_flag("--strict", strict, "reject unknown JSON fields");
  check_cmd->add_flag("--permissive", permissive,
                      "accept flat or negatively oriented solutions");
  check_cmd->add_option("--shift-bound", shift_bound,
                        "branch-shift box for the membership residual")
      ->check(CLI::NonNegativeNumber);

  CLI::App* hom_cmd =
      app.add_subcommand("homology", "homology of a chain complex file");
  hom_cmd->add_option("input", input, "chain complex JSON file")->required();
  add_format(hom_cmd);
  hom_cmd->add_flag("--strict", strict, "reject unknown JSON fields");

  CLI::App* count_cmd = app.add_subcommand(
      "count-orientations", "number of stable-homotopy orientations");
  count_cmd->add_option("input", input, "chain complex JSON file")->required();
  count_cmd->add_flag("--strict", strict, "reject unknown JSON fields");

  CLI::App* batch_cmd = app.add_subcommand(
      "report-batch", "reports for many files plus a CSV summary");
  batch_cmd->add_option("inputs", inputs, "triangulation JSON files")
      ->required();
  batch_cmd->add_option("--out-dir", out_dir_s, "output directory")->required();
  batch_cmd->add_option("--precision", precision,
                        "significant digits in numeric output")
      ->check(CLI::Range(6, 30));
  batch_cmd->add_flag("--strict", strict, "reject unknown JSON fields");
  batch_cmd->add_flag("--permissive", permissive,
                      "accept flat or negatively oriented solutions");
  batch_cmd->add_option("--shift-bound", shift_bound, "")->check(CLI::NonNegativeNumber);
  batch_cmd->add_option("--flattening-bound", flattening_bound, "")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  ReportOptions ropts;
  ropts.solve.max_iterations = max_iter;
  ropts.solve.permissive = permissive;
  ropts.shift_bound = shift_bound;
  ropts.flattening_bound = flattening_bound;

  try {
    if (app.got_subcommand(solve_cmd)) {
      const IdealTriangulation tri = load_triangulation(input, strict);
      ShapeAssignment s;
      try {
        s = solve_shapes(tri, std::nullopt, ropts.solve);
      } catch (const error& e) {
        throw staged_error(Stage::solve,
                           "solve_shapes: " + std::string(e.what()));
      }
      for (const auto& w : tri.warnings) err << "warning: " << w << "\n";
      if (format == "json") {
        out << "{\n  \"name\": \"" << tri.name << "\",\n  \"shapes\": [";
        for (std::size_t j = 0; j < s.shapes.size(); ++j) {
          if (j) out << ", ";
          out << "{\"re\": " << fmt(s.shapes[j].real(), precision)
              << ", \"im\": " << fmt(s.shapes[j].imag(), precision) << "}";
        }
        out << "],\n  \"residual\": " << fmt(s.residual, precision)
            << ",\n  \"iterations\": " << s.iterations << "\n}\n";
      } else {
        out << "name: " << tri.name << "\n";
        for (std::size_t j = 0; j < s.shapes.size(); ++j) {
          out << "z" << j << " = " << fmt(s.shapes[j].real(), precision)
              << (s.shapes[j].imag() < 0 ? " - " : " + ")
              << fmt(std::abs(s.shapes[j].imag()), precision) << "i\n";
        }
        out << "residual: " << fmt(s.residual, precision) << "\n";
        out << "iterations: " << s.iterations << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(inv_cmd)) {
      const IdealTriangulation tri = load_triangulation(input, strict);
      const InvariantReport rep = compute_report(tri, ropts);
      out << (format == "json" ? report_to_json(rep, precision)
                               : report_to_text(rep, precision));
      return 0;
    }

    if (app.got_subcommand(check_cmd)) {
      const IdealTriangulation tri = load_triangulation(input, strict);
      ShapeAssignment s;
      try {
        s = solve_shapes(tri, std::nullopt, ropts.solve);
      } catch (const error& e) {
        throw staged_error(Stage::solve,
                           "solve_shapes: " + std::string(e.what()));
      }
      BlochInvariantResult inv;
      try {
        inv = bloch_invariant(tri, s);
      } catch (const error& e) {
        throw staged_error(Stage::invariant,
                           "bloch_invariant: " + std::string(e.what()));
      }
      const double defect = bloch_defect(inv.element, shift_bound);
      if (format == "json") {
        out << "{\n  \"name\": \"" << tri.name << "\",\n"
            << "  \"gluing_residual\": " << fmt(s.residual, precision) << ",\n"
            << "  \"certificate\": " << (inv.certificate ? "true" : "false")
            << ",\n"
            << "  \"bloch_defect\": " << fmt(defect, precision) << "\n}\n";
      } else {
        out << "name: " << tri.name << "\n"
            << "gluing_residual: " << fmt(s.residual, precision)
            << " (certificate: " << (inv.certificate ? "true" : "false")
            << ")\n"
            << "bloch_defect: " << fmt(defect, precision)
            << " (heuristic; the gluing certificate is the sound check)\n";
      }
      return 0;
    }

    if (app.got_subcommand(hom_cmd)) {
      const ChainComplex c = load_chain_complex(input, strict);
      HomologySummary h;
      try {
        h = homology(c);
      } catch (const error& e) {
        throw staged_error(Stage::invariant,
                           "homology: " + std::string(e.what()));
      }
      out << (format == "json" ? homology_to_json(h, precision)
                               : homology_to_text(h));
      return 0;
    }

    if (app.got_subcommand(count_cmd)) {
      const ChainComplex c = load_chain_complex(input, strict);
      try {
        out << count_stable_orientations(homology(c)) << "\n";
      } catch (const error& e) {
        throw staged_error(Stage::invariant,
                           "count_stable_orientations: " + std::string(e.what()));
      }
      return 0;
    }

    if (app.got_subcommand(batch_cmd)) {
      const fs::path out_dir(out_dir_s);
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      std::vector<std::future<BatchRow>> futures;
      futures.reserve(inputs.size());
      for (const std::string& path : inputs) {
        futures.push_back(std::async(std::launch::async, batch_one, path,
                                     out_dir, ropts, strict, precision));
      }
      std::string csv =
          "name,n_tet,volume,borel_regulator,cs,cs_ambiguity,bloch_defect,"
          "certificate,ambiguity\n";
      bool any_failed = false;
      for (std::size_t i = 0; i < futures.size(); ++i) {  // input order
        const BatchRow row = futures[i].get();
        if (!row.diagnostic.empty()) {
          err << "error: " << row.diagnostic << "\n";
          any_failed = true;
        } else {
          csv += row.csv;
        }
      }
      write_file_atomic(out_dir / "summary.csv", csv);
      out << "wrote " << (out_dir / "summary.csv").string() << "\n";
      return any_failed ? 1 : 0;
    }
  } catch (const staged_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no subcommand\n";
  return 2;
}

}  // namespace bloch::cli
