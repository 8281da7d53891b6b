#include "awe/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace awe::io {

int TimeSeries::col(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return (int)i;
  return -1;
}

void write_csv(const TimeSeries& ts, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  for (std::size_t i = 0; i < ts.names.size(); ++i)
    f << (i ? "," : "") << ts.names[i];
  f << "\n";
  char buf[32];
  const std::size_t n = ts.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < ts.cols.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", ts.cols[i][r]);
      f << (i ? "," : "") << buf;
    }
    f << "\n";
  }
}

TimeSeries read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  TimeSeries ts;
  std::string line;
  if (!std::getline(f, line)) return ts;
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) ts.names.push_back(tok);
  ts.cols.resize(ts.names.size());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::size_t i = 0;
    while (std::getline(ls, tok, ',') && i < ts.cols.size())
      ts.cols[i++].push_back(std::stod(tok));
  }
  return ts;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return json::parse(f);
}

namespace {

struct Sha256 {
  std::uint32_t h[8] = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                        0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
  std::uint8_t buf[64];
  std::size_t buflen = 0;
  std::uint64_t total = 0;

  static std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
  }

  void block(const std::uint8_t* p) {
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b,
        0x59f111f1, 0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01,
        0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7,
        0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc,
        0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152,
        0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
        0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819,
        0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116, 0x1e376c08,
        0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f,
        0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) |
             (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 =
          rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 =
          rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5],
                  g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
      const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = S0 + mj;
      hh = g; g = f; f = e; e = d + t1;
      d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const void* data, std::size_t len) {
    const std::uint8_t* p = (const std::uint8_t*)data;
    total += len;
    while (len) {
      const std::size_t take = std::min(len, sizeof(buf) - buflen);
      std::memcpy(buf + buflen, p, take);
      buflen += take; p += take; len -= take;
      if (buflen == 64) { block(buf); buflen = 0; }
    }
  }

  std::string finish() {
    const std::uint64_t bits = total * 8;
    const std::uint8_t one = 0x80;
    update(&one, 1);
    const std::uint8_t zero = 0;
    while (buflen != 56) update(&zero, 1);
    std::uint8_t lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = (std::uint8_t)(bits >> (56 - 8 * i));
    update(lenb, 8);
    char out[65];
    for (int i = 0; i < 8; ++i)
      std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
  }
};

}  // namespace

std::string sha256_hex(const void* data, std::size_t len) {
  Sha256 s;
  s.update(data, len);
  return s.finish();
}

std::string sha256_hex(const std::string& s) {
  return sha256_hex(s.data(), s.size());
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  Sha256 s;
  char buf[65536];
  while (f) {
    f.read(buf, sizeof buf);
    s.update(buf, (std::size_t)f.gcount());
  }
  return s.finish();
}

namespace {

std::string fmt_tick(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

}  // namespace

void write_svg_plot(const TimeSeries& ts, const PlotSpec& spec,
                    const std::string& path) {
  if (ts.cols.empty() || ts.rows() < 2)
    throw std::runtime_error("svg plot: empty series");
  const int W = spec.width, H = spec.height;
  const int ml = 60, mr = 12, mt = 28, mb = 40;
  const double pw = W - ml - mr, ph = H - mt - mb;

  std::vector<int> idx;
  for (const auto& s : spec.series) {
    const int c = ts.col(s);
    if (c < 0) throw std::runtime_error("svg plot: unknown column " + s);
    idx.push_back(c);
  }
  if (idx.empty())
    for (std::size_t i = 1; i < ts.cols.size(); ++i) idx.push_back((int)i);

  const auto& x = ts.cols[0];
  double xmin = x.front(), xmax = x.back();
  if (xmax <= xmin) xmax = xmin + 1;
  double ymin = 1e300, ymax = -1e300;
  for (int c : idx)
    for (double v : ts.cols[c]) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (!(ymax > ymin)) { ymax = ymin + 1; ymin -= 1; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad; ymax += pad;

  auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#ff7f0e", "#9467bd", "#8c564b"};
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
    << H << "' viewBox='0 0 " << W << " " << H << "'>\n"
    << "<rect width='100%' height='100%' fill='white'/>\n";
  // grid + ticks
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    f << "<line x1='" << px(xv) << "' y1='" << mt << "' x2='" << px(xv)
      << "' y2='" << mt + ph << "' stroke='#ddd'/>\n"
      << "<line x1='" << ml << "' y1='" << py(yv) << "' x2='" << ml + pw
      << "' y2='" << py(yv) << "' stroke='#ddd'/>\n"
      << "<text x='" << px(xv) << "' y='" << H - mb + 16
      << "' font-size='11' text-anchor='middle'>" << fmt_tick(xv)
      << "</text>\n"
      << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
      << "' font-size='11' text-anchor='end'>" << fmt_tick(yv) << "</text>\n";
  }
  f << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='"
    << ph << "' fill='none' stroke='#444'/>\n";
  // series
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& y = ts.cols[idx[k]];
    f << "<polyline fill='none' stroke='" << colors[k % 6]
      << "' stroke-width='1.2' points='";
    const std::size_t n = ts.rows();
    const std::size_t stride = std::max<std::size_t>(1, n / 4000);
    for (std::size_t r = 0; r < n; r += stride) {
      char b[48];
      std::snprintf(b, sizeof b, "%.1f,%.1f ", px(x[r]), py(y[r]));
      f << b;
    }
    f << "'/>\n";
    f << "<text x='" << ml + 8 + 110 * (int)k << "' y='" << mt - 8
      << "' font-size='12' fill='" << colors[k % 6] << "'>"
      << ts.names[idx[k]] << "</text>\n";
  }
  f << "<text x='" << W / 2 << "' y='" << H - 8
    << "' font-size='12' text-anchor='middle'>" << spec.x_label
    << "</text>\n";
  if (!spec.title.empty())
    f << "<text x='" << W / 2 << "' y='" << 14
      << "' font-size='13' text-anchor='middle'>" << spec.title
      << "</text>\n";
  f << "</svg>\n";
}

json RunManifest::to_json() const {
  json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["config"] = config_path;
  j["seed"] = seed;
  json a = json::object();
  for (const auto& [k, v] : artifacts) a[k] = v;
  j["artifacts"] = a;
  return j;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  write_json(m.to_json(), path);
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index nr = (Eigen::Index)j.size();
  if (nr == 0) return {};
  const Eigen::Index nc = (Eigen::Index)j[0].size();
  Eigen::MatrixXd M(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index c = 0; c < nc; ++c) M(i, c) = j[(size_t)i][(size_t)c];
  return M;
}

void apply_override(json& cfg, const std::string& dotted, const json& value) {
  json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dot - pos);
    if (key.empty()) throw std::runtime_error("bad override path: " + dotted);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

}  // namespace awe::io
