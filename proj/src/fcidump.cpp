#include "mbgf/fcidump.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mbgf/errors.hpp"
#include "mbgf/util.hpp"

namespace mbgf {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

bool header_end(const std::string& token) { return token == "/" || upper(token) == "&END"; }

long parse_int(const std::string& tok, long line) {
  try {
    std::size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw parse_error("expected an integer, got '" + tok + "'", line);
  }
}

double parse_real(std::string tok, long line) {
  for (char& c : tok)
    if (c == 'D' || c == 'd') c = 'E';
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw parse_error("expected a real number, got '" + tok + "'", line);
  }
}

}  // namespace

spatial_integrals parse_fcidump_spatial(std::istream& in) {
  spatial_integrals sp;
  std::string line;
  long lineno = 0;

  // Header: &FCI KEY=VAL,... possibly spanning lines, terminated by / or &END.
  std::string header;
  bool in_header = false, header_done = false;
  while (!header_done && std::getline(in, line)) {
    ++lineno;
    std::string probe = upper(line);
    if (!in_header) {
      auto pos = probe.find("&FCI");
      if (pos == std::string::npos) {
        if (probe.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        throw parse_error("missing &FCI header", lineno);
      }
      in_header = true;
      line = line.substr(pos + 4);
    }
    // Scan for the terminator; keep everything before it.
    std::istringstream toks(line);
    std::string tok;
    while (toks >> tok) {
      if (header_end(tok)) {
        header_done = true;
        break;
      }
      // A token like "ISYM=1,/" also ends the header.
      if (!tok.empty() && tok.back() == '/') {
        header += " " + tok.substr(0, tok.size() - 1);
        header_done = true;
        break;
      }
      header += " " + tok;
    }
  }
  if (!header_done) throw parse_error("unterminated FCIDUMP header", lineno);

  // KEY=VAL pairs; values may be comma separated lists.
  for (char& c : header)
    if (c == ',') c = ' ';
  {
    std::string canon = upper(header);
    std::istringstream toks(canon);
    std::string tok;
    std::string pending_key;
    while (toks >> tok) {
      auto eq = tok.find('=');
      std::string key, val;
      if (eq != std::string::npos) {
        key = tok.substr(0, eq);
        val = tok.substr(eq + 1);
        pending_key = key;
      } else {
        key = pending_key;  // continuation of a list value, e.g. ORBSYM
        val = tok;
      }
      if (val.empty()) continue;
      if (key == "NORB")
        sp.norb = static_cast<int>(parse_int(val, lineno));
      else if (key == "NELEC")
        sp.nelec = static_cast<int>(parse_int(val, lineno));
      else if (key == "MS2")
        sp.ms2 = static_cast<int>(parse_int(val, lineno));
      // ORBSYM, ISYM and any other keys are accepted and ignored.
    }
  }
  if (sp.norb <= 0 || sp.norb > 32) throw parse_error("NORB missing or out of range", lineno);
  if (sp.nelec <= 0) throw parse_error("NELEC missing or out of range", lineno);
  sp.allocate();

  std::vector<double> eps(sp.norb, 0.0);
  bool have_eps = false;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream toks(line);
    std::string vtok;
    if (!(toks >> vtok)) continue;  // blank line
    double value = parse_real(vtok, lineno);
    long idx[4];
    for (int n = 0; n < 4; ++n) {
      std::string itok;
      if (!(toks >> itok)) throw parse_error("expected four orbital indices", lineno);
      idx[n] = parse_int(itok, lineno);
    }
    std::string extra;
    if (toks >> extra) throw parse_error("trailing token '" + extra + "'", lineno);
    long i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    for (int n = 0; n < 4; ++n)
      if (idx[n] < 0 || idx[n] > sp.norb)
        throw parse_error("orbital index " + std::to_string(idx[n]) + " out of range", lineno);

    if (i == 0 && j == 0 && k == 0 && l == 0) {
      sp.e_nuc = value;
    } else if (j == 0 && k == 0 && l == 0) {
      eps[i - 1] = value;
      have_eps = true;
    } else if (k == 0 && l == 0) {
      if (i == 0) throw parse_error("one-electron entry with zero row index", lineno);
      sp.hcore(i - 1, j - 1) = value;
      sp.hcore(j - 1, i - 1) = value;
    } else if (i == 0 || j == 0 || k == 0 || l == 0) {
      throw parse_error("mixed zero and nonzero indices", lineno);
    } else {
      sp.eri_set(static_cast<int>(i - 1), static_cast<int>(j - 1), static_cast<int>(k - 1),
                 static_cast<int>(l - 1), value);
    }
  }
  if (have_eps) sp.orbital_energies = eps;
  return sp;
}

integral_set parse_fcidump(std::istream& in) { return expand_to_spin(parse_fcidump_spatial(in)); }

integral_set parse_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open FCIDUMP file: " + path);
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const spatial_integrals& sp) {
  out << "&FCI NORB=" << sp.norb << ",NELEC=" << sp.nelec << ",MS2=" << sp.ms2 << ",\n";
  out << " ORBSYM=";
  for (int i = 0; i < sp.norb; ++i) out << "1,";
  out << "\n ISYM=1,\n&END\n";
  auto put = [&](double v, int i, int j, int k, int l) {
    out << " " << format_full(v) << " " << i << " " << j << " " << k << " " << l << "\n";
  };
  for (int i = 0; i < sp.norb; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          double v = sp.eri_get(i, j, k, l);
          if (v != 0.0) put(v, i + 1, j + 1, k + 1, l + 1);
        }
  for (int i = 0; i < sp.norb; ++i)
    for (int j = 0; j <= i; ++j)
      if (sp.hcore(i, j) != 0.0) put(sp.hcore(i, j), i + 1, j + 1, 0, 0);
  if (!sp.orbital_energies.empty())
    for (int i = 0; i < sp.norb; ++i) put(sp.orbital_energies[i], i + 1, 0, 0, 0);
  put(sp.e_nuc, 0, 0, 0, 0);
}

}  // namespace mbgf
