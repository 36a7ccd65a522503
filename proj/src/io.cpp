#include "lmcf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

namespace lmcf {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw IoError("CSV row width does not match the header");
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

std::string immersion_csv(const VertexImmersion& im) {
  const GridSpec& g = im.grid;
  std::ostringstream meta;
  meta << "# lmcf-immersion n=" << g.n << " m=" << g.m << " m_phi=" << g.m_phi
       << " m_theta=" << g.m_theta << " scheme=" << (g.scheme == DerivativeScheme::fd4 ? "fd4" : "spectral")
       << " n_space=" << im.space.n_space << " n_time=" << im.space.n_time << '\n';
  std::vector<std::string> header{"sample", "theta", "phi"};
  for (int a = 0; a < im.space.dim(); ++a) header.push_back("x" + std::to_string(a));
  CsvTable t(header);
  for (int s = 0; s < g.size(); ++s) {
    std::vector<std::string> cells{std::to_string(s), format_double(g.theta(s)), format_double(g.phi(s))};
    for (int a = 0; a < im.space.dim(); ++a) cells.push_back(format_double(im.positions(a, s)));
    t.add_row(cells);
  }
  return meta.str() + t.str();
}

void write_immersion_csv(const fs::path& path, const VertexImmersion& im) { atomic_write(path, immersion_csv(im)); }

VertexImmersion read_immersion_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open immersion file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# lmcf-immersion", 0) != 0)
    throw IoError(path.string() + ": missing '# lmcf-immersion' metadata line");
  std::map<std::string, std::string> kv;
  std::istringstream ms(line.substr(16));
  std::string tok;
  while (ms >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto geti = [&](const std::string& k) {
    const auto it = kv.find(k);
    if (it == kv.end()) throw IoError(path.string() + ": metadata lacks '" + k + "'");
    return std::stoi(it->second);
  };
  GridSpec g;
  g.n = geti("n");
  g.m = geti("m");
  g.m_phi = geti("m_phi");
  g.m_theta = geti("m_theta");
  g.scheme = kv["scheme"] == "fd4" ? DerivativeScheme::fd4 : DerivativeScheme::spectral;
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  const SignatureSpace sp(geti("n_space"), geti("n_time"));
  if (sp.n_space != g.n + 1) throw IoError(path.string() + ": signature does not match the grid");
  VertexImmersion im{g, sp, Mat::Zero(sp.dim(), g.size())};
  std::getline(in, line);  // header
  std::vector<char> seen(g.size(), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    while (std::getline(ls, tok, ',')) cells.push_back(tok);
    if (static_cast<int>(cells.size()) != 3 + sp.dim()) throw IoError(path.string() + ": bad row width");
    const int s = std::stoi(cells[0]);
    if (s < 0 || s >= g.size()) throw IoError(path.string() + ": sample index out of range");
    for (int a = 0; a < sp.dim(); ++a) im.positions(a, s) = std::stod(cells[3 + a]);
    seen[s] = 1;
  }
  for (int s = 0; s < g.size(); ++s)
    if (!seen[s]) throw IoError(path.string() + ": sample " + std::to_string(s) + " missing");
  return im;
}

}  // namespace lmcf
