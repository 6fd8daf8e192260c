#pragma once

// Text/CSV renderings of the group tables, level tables and flip reports,
// plus the per-run manifest. All numeric formatting is locale-independent
// and deterministic so identical inputs give byte-identical outputs.

#include <complex>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "spinlab/dynamics.hpp"
#include "spinlab/group.hpp"
#include "spinlab/hamiltonian.hpp"
#include "spinlab/montecarlo.hpp"
#include "spinlab/symbolic.hpp"

#include "json.hpp"

namespace spinlab {

inline std::string format_double(double v, int precision = 9) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

inline std::string format_complex(const std::complex<double>& z, int precision = 6) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.*g%+.*gi", precision, z.real(), precision, z.imag());
  return buf;
}

inline void write_multiplication_table_csv(std::ostream& out) {
  const auto& ops = group_elements();
  const auto table = multiplication_table();
  out << "op";
  for (const auto& g : ops) out << ',' << g.name;
  out << '\n';
  for (int a = 0; a < 6; ++a) {
    out << ops[a].name;
    for (int b = 0; b < 6; ++b) out << ',' << ops[table[a][b] - 1].name;
    out << '\n';
  }
}

inline void write_multiplication_table_text(std::ostream& out) {
  const auto& ops = group_elements();
  const auto table = multiplication_table();
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%-5s", "*");
  out << buf;
  for (const auto& g : ops) {
    std::snprintf(buf, sizeof(buf), "%-5s", g.name.c_str());
    out << buf;
  }
  out << '\n';
  for (int a = 0; a < 6; ++a) {
    std::snprintf(buf, sizeof(buf), "%-5s", ops[a].name.c_str());
    out << buf;
    for (int b = 0; b < 6; ++b) {
      std::snprintf(buf, sizeof(buf), "%-5s", ops[table[a][b] - 1].name.c_str());
      out << buf;
    }
    out << '\n';
  }
}

inline void write_basis_catalog_text(std::ostream& out) {
  for (const auto& b : symmetrized_spin_bases()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%-3s row %d  %-10s", irrep_name(b.irrep), b.row,
                  b.family.c_str());
    out << buf << b.expr.str() << '\n';
  }
}

inline void write_character_table_csv(std::ostream& out) {
  out << "irrep,E,C3+,C3-,sv1,sv2,sv3\n";
  for (Irrep g : {Irrep::A1, Irrep::A2, Irrep::E}) {
    out << irrep_name(g);
    for (int n = 1; n <= 6; ++n) out << ',' << character(g, n);
    out << '\n';
  }
}

inline void write_representation_matrices(std::ostream& out, bool complex_basis) {
  const auto& ops = group_elements();
  for (const auto& g : ops) {
    out << (complex_basis ? "N" : "M") << g.index << " (" << g.name << ")\n";
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (complex_basis)
          out << format_complex(g.complex_matrix[i][j].value());
        else
          out << format_double(g.real_matrix[i][j].value());
        out << (j == 0 ? ' ' : '\n');
      }
    }
    out << '\n';
  }
}

inline void write_basis_catalog(std::ostream& out) {
  out << "irrep,row,family,expression\n";
  for (const auto& b : symmetrized_spin_bases())
    out << irrep_name(b.irrep) << ',' << b.row << ',' << b.family << ",\"" << b.expr.str()
        << "\"\n";
}

inline void write_levels_csv(std::ostream& out, const std::vector<LabeledLevel>& levels) {
  out << "energy_MHz,label,m_I,overlap\n";
  for (const auto& l : levels)
    out << format_double(l.energy_mhz, 12) << ',' << l.label << ',' << l.m_i << ','
        << format_double(l.overlap, 6) << '\n';
}

inline void write_flip_report_csv(std::ostream& out, const FlipReport& rep,
                                  const McReport* mc = nullptr) {
  out << "transition,probability,upper,lower,saturated";
  if (mc) out << ",mc_mean,mc_se";
  out << '\n';
  auto row = [&](const char* name, const FlipRow& r, const McRow* m) {
    out << name << ',' << format_double(r.probability, 6) << ','
        << (r.upper ? format_double(*r.upper, 6) : std::string()) << ','
        << (r.lower ? format_double(*r.lower, 6) : std::string()) << ','
        << (r.saturated ? "yes" : "no");
    if (mc) {
      out << ',';
      if (m) out << format_double(m->mean, 6) << ',' << format_double(m->se, 6);
      else out << ',';
    }
    out << '\n';
  };
  row("pm1_to_mp1", rep.pm1_to_mp1, mc ? &mc->pm1_to_mp1 : nullptr);
  row("pm1_to_0", rep.pm1_to_0, mc ? &mc->pm1_to_0 : nullptr);
  row("0_to_pm1", rep.zero_to_pm1, mc ? &mc->zero_to_pm1 : nullptr);
}

inline void write_flip_report_text(std::ostream& out, const FlipReport& rep,
                                   const McReport* mc = nullptr) {
  out << "transition        probability";
  if (mc) out << "      monte-carlo";
  out << '\n';
  char buf[160];
  auto line = [&](const char* name, const FlipRow& r, const McRow* m) {
    if (r.upper && r.lower)
      std::snprintf(buf, sizeof(buf), "%-14s %8.3f +%.3f/-%.3f", name, r.probability,
                    *r.upper - r.probability, r.probability - *r.lower);
    else
      std::snprintf(buf, sizeof(buf), "%-14s %8.3f", name, r.probability);
    out << buf;
    if (m) {
      std::snprintf(buf, sizeof(buf), "   %8.4f +- %.4f", m->mean, m->se);
      out << buf;
    }
    if (r.saturated) out << "  (saturated)";
    out << '\n';
  };
  line("|+-1> -> |-+1>", rep.pm1_to_mp1, mc ? &mc->pm1_to_mp1 : nullptr);
  line("|+-1> -> |0>", rep.pm1_to_0, mc ? &mc->pm1_to_0 : nullptr);
  line("|0> -> |+-1>", rep.zero_to_pm1, mc ? &mc->zero_to_pm1 : nullptr);
}

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> inputs;
  std::vector<std::string> outputs;
  std::string tool_version;
  std::optional<std::uint64_t> seed;

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& [k, v] : inputs) in[k] = v;
    j["inputs"] = in;
    j["outputs"] = outputs;
    j["toolVersion"] = tool_version;
    if (seed) j["seed"] = *seed;
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    out << json().dump(2) << '\n';
  }
};

}  // namespace spinlab
