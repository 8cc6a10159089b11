#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "clocklmi/sdp.hpp"

namespace clocklmi {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// Sparse SDPA format: the file describes
//   min c^T x  s.t.  sum_k x_k F_k - F_0 >= 0,
// so matno 0 carries the negated constant parts of our blocks.
std::string export_sdpa(const SdpProblem& p) {
  std::ostringstream os;
  os << p.nvars << "\n";
  os << p.blocks.size() << "\n";
  for (size_t i = 0; i < p.blocks.size(); ++i) {
    if (i) os << " ";
    os << (p.blocks[i].diagonal ? -p.blocks[i].dim : p.blocks[i].dim);
  }
  os << "\n";
  for (int k = 0; k < p.nvars; ++k) {
    if (k) os << " ";
    os << fmt(p.objective.size() == p.nvars ? p.objective[k] : 0.0);
  }
  if (p.nvars == 0) os << "0.0";
  os << "\n";
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const SdpBlock& blk = p.blocks[b];
    for (int i = 0; i < blk.dim; ++i)
      for (int j = i; j < blk.dim; ++j) {
        double v = -blk.f0(i, j);
        if (blk.diagonal && i != j) continue;
        if (v != 0.0)
          os << "0 " << b + 1 << " " << i + 1 << " " << j + 1 << " " << fmt(v) << "\n";
      }
    for (size_t k = 0; k < blk.vars.size(); ++k) {
      std::vector<SdpEntry> es = blk.entries[k];
      std::sort(es.begin(), es.end(), [](const SdpEntry& a, const SdpEntry& b2) {
        return a.r != b2.r ? a.r < b2.r : a.c < b2.c;
      });
      for (const SdpEntry& e : es)
        os << blk.vars[k] + 1 << " " << b + 1 << " " << e.r + 1 << " " << e.c + 1 << " "
           << fmt(e.v) << "\n";
    }
  }
  return os.str();
}

SdpProblem import_sdpa(const std::string& text) {
  // Strip comments; the separators {},() are treated as whitespace.
  std::string clean;
  clean.reserve(text.size());
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
    for (char& ch : line)
      if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ch = ' ';
    clean += line;
    clean += '\n';
  }
  std::istringstream is(clean);

  SdpProblem p;
  int nblocks = 0;
  if (!(is >> p.nvars >> nblocks)) throw std::invalid_argument("sdpa: bad header");
  if (p.nvars < 0 || nblocks <= 0) throw std::invalid_argument("sdpa: bad sizes");
  std::vector<int> sizes(static_cast<size_t>(nblocks));
  for (int& s : sizes)
    if (!(is >> s)) throw std::invalid_argument("sdpa: bad block sizes");
  p.objective = Vector::Zero(p.nvars);
  for (int k = 0; k < p.nvars; ++k)
    if (!(is >> p.objective[k])) throw std::invalid_argument("sdpa: bad objective");
  if (p.nvars == 0) {
    double dummy;
    is >> dummy;
  }
  for (int s : sizes) {
    SdpBlock b;
    b.diagonal = s < 0;
    b.dim = std::abs(s);
    b.f0 = Matrix::Zero(b.dim, b.dim);
    p.blocks.push_back(std::move(b));
  }
  int matno, blkno, i, j;
  double v;
  while (is >> matno >> blkno >> i >> j >> v) {
    if (blkno < 1 || blkno > nblocks || matno < 0 || matno > p.nvars)
      throw std::invalid_argument("sdpa: entry out of range");
    SdpBlock& b = p.blocks[static_cast<size_t>(blkno - 1)];
    if (i < 1 || j < 1 || i > b.dim || j > b.dim)
      throw std::invalid_argument("sdpa: index out of range");
    if (matno == 0) {
      b.f0(i - 1, j - 1) = -v;
      b.f0(j - 1, i - 1) = -v;
    } else {
      b.add_entry(matno - 1, i - 1, j - 1, v);
    }
  }
  return p;
}

}  // namespace clocklmi
