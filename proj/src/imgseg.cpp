#include "distsdp/imgseg.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "distsdp/error.hpp"

namespace distsdp {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& b) : b_(b) {}

  void skip_space_and_comments() {
    while (i_ < b_.size()) {
      if (std::isspace(static_cast<unsigned char>(b_[i_]))) {
        ++i_;
      } else if (b_[i_] == '#') {
        while (i_ < b_.size() && b_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  // Returns -1 when no unsigned integer is present.
  long number() {
    skip_space_and_comments();
    if (i_ >= b_.size() || !std::isdigit(static_cast<unsigned char>(b_[i_]))) return -1;
    long v = 0;
    while (i_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[i_]))) {
      v = v * 10 + (b_[i_] - '0');
      if (v > 1L << 30) return -1;
      ++i_;
    }
    return v;
  }

  std::size_t pos() const { return i_; }
  void advance(std::size_t k) { i_ += k; }
  bool at_end() const { return i_ >= b_.size(); }
  char peek() const { return b_[i_]; }

 private:
  const std::string& b_;
  std::size_t i_ = 0;
};

}  // namespace

Image parse_ppm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '3' && bytes[1] != '6'))
    throw Error(ErrorCode::UnsupportedFormat, "expected a P3 or P6 image");
  const bool binary = bytes[1] == '6';
  HeaderReader rd(bytes);
  rd.advance(2);
  if (!rd.at_end() && !std::isspace(static_cast<unsigned char>(rd.peek())) && rd.peek() != '#')
    throw Error(ErrorCode::UnsupportedFormat, "expected a P3 or P6 image");
  const long w = rd.number();
  const long h = rd.number();
  const long maxval = rd.number();
  if (w <= 0 || h <= 0 || maxval <= 0)
    throw Error(ErrorCode::CorruptHeader, "width, height and maxval must be positive integers");
  if (maxval != 255) throw Error(ErrorCode::UnsupportedFormat, "only maxval 255 is supported");
  if (w * h > (1L << 26)) throw Error(ErrorCode::CorruptHeader, "image dimensions too large");

  Image img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  const std::size_t count = static_cast<std::size_t>(w * h);
  img.rgb.resize(count);
  if (binary) {
    if (rd.at_end() || !std::isspace(static_cast<unsigned char>(rd.peek())))
      throw Error(ErrorCode::CorruptHeader, "missing separator after maxval");
    rd.advance(1);
    const std::size_t start = rd.pos();
    if (bytes.size() < start + 3 * count)
      throw Error(ErrorCode::TruncatedPixelData, "expected " + std::to_string(3 * count) + " bytes of pixel data");
    for (std::size_t k = 0; k < count; ++k)
      for (int ch = 0; ch < 3; ++ch)
        img.rgb[k][ch] = static_cast<std::uint8_t>(bytes[start + 3 * k + ch]);
  } else {
    for (std::size_t k = 0; k < count; ++k)
      for (int ch = 0; ch < 3; ++ch) {
        const long v = rd.number();
        if (v < 0 || v > 255)
          throw Error(ErrorCode::TruncatedPixelData,
                      "pixel data ends or is invalid at sample " + std::to_string(3 * k + ch));
        img.rgb[k][ch] = static_cast<std::uint8_t>(v);
      }
  }
  return img;
}

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ppm(ss.str());
}

std::string encode_ppm(const Image& img, bool binary) {
  std::ostringstream os;
  os << (binary ? "P6" : "P3") << '\n' << img.width << ' ' << img.height << "\n255\n";
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const auto& px = img.at(r, c);
      if (binary) {
        os.write(reinterpret_cast<const char*>(px.data()), 3);
      } else {
        os << int(px[0]) << ' ' << int(px[1]) << ' ' << int(px[2]) << (c + 1 < img.width ? ' ' : '\n');
      }
    }
  }
  return os.str();
}

double rgb_distance(const std::array<std::uint8_t, 3>& a, const std::array<std::uint8_t, 3>& b) {
  double s = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    const double d = static_cast<double>(a[ch]) - static_cast<double>(b[ch]);
    s += d * d;
  }
  return std::sqrt(s);
}

CoefficientMatrix build_weights(const Image& img, double threshold) {
  CoefficientMatrix M(img.width * img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const int u = r * img.width + c;
      if (c + 1 < img.width) {
        const double d = rgb_distance(img.at(r, c), img.at(r, c + 1));
        if (d > threshold) M.add(u, u + 1, d);
      }
      if (r + 1 < img.height) {
        const double d = rgb_distance(img.at(r, c), img.at(r + 1, c));
        if (d > threshold) M.add(u, u + img.width, d);
      }
    }
  }
  return M;
}

std::vector<int> strip_bounds(int height, int m_agents) {
  if (m_agents < 1) throw Error(ErrorCode::InvalidProblem, "need at least one agent");
  if (m_agents > height)
    throw Error(ErrorCode::TooManyAgents, std::to_string(m_agents) + " agents for " +
                                              std::to_string(height) + " rows");
  std::vector<int> b(m_agents + 1);
  for (int k = 0; k <= m_agents; ++k) {
    const long num = static_cast<long>(k) * (height - 1);
    b[k] = 1 + static_cast<int>((num + m_agents - 1) / m_agents);
  }
  return b;
}

Problem strip_problem(const Image& img, const CoefficientMatrix& M, int m_agents) {
  const std::vector<int> b = strip_bounds(img.height, m_agents);
  Problem prob;
  prob.M = M;
  for (int k = 0; k < m_agents; ++k) {
    std::vector<int> J;
    for (int r = b[k] - 1; r <= b[k + 1] - 1; ++r)
      for (int c = 0; c < img.width; ++c) J.push_back(r * img.width + c);
    prob.agents.push_back(std::move(J));
  }
  for (const Entry& e : M.entries()) {
    const int r1 = e.j / img.width + 1;
    const int r2 = e.l / img.width + 1;
    int owner = -1;
    for (int k = 0; k < m_agents && owner < 0; ++k)
      if (b[k] <= std::min(r1, r2) && std::max(r1, r2) <= b[k + 1]) owner = k;
    prob.owner.push_back(owner);
  }
  return prob;
}

AgentPartition strip_partition(const Image& img, const CoefficientMatrix& M, int m_agents) {
  return build_partition(strip_problem(img, M, m_agents));
}

Signs align_labels(const Image& img, const CoefficientMatrix& M, double threshold,
                   const Signs& signs) {
  const int n = img.width * img.height;
  if (static_cast<int>(signs.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "label count differs from pixel count");
  // Components of the positive-weight graph.
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (const Entry& e : M.entries())
    if (e.w > 0.0) comp[find(e.j)] = find(e.l);
  std::vector<std::vector<int>> members(n);
  for (int v = 0; v < n; ++v) members[find(v)].push_back(v);

  auto neighbours = [&](int v) {
    std::vector<int> out;
    const int r = v / img.width, c = v % img.width;
    if (c > 0) out.push_back(v - 1);
    if (c + 1 < img.width) out.push_back(v + 1);
    if (r > 0) out.push_back(v - img.width);
    if (r + 1 < img.height) out.push_back(v + img.width);
    return out;
  };

  Signs out(signs);
  std::vector<char> oriented(n, 0);
  std::vector<int> queue;
  for (int seed = 0; seed < n; ++seed) {
    if (oriented[seed]) continue;
    queue.assign(1, seed);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      if (oriented[v]) continue;
      const int root = find(v);
      int score = 0;
      for (int u : members[root])
        for (int w : neighbours(u))
          if (oriented[w] && rgb_distance(img.rgb[u], img.rgb[w]) <= threshold)
            score += (signs[u] == out[w]) ? 1 : -1;
      const int flip = score < 0 ? -1 : 1;
      for (int u : members[root]) {
        out[u] = flip * signs[u];
        oriented[u] = 1;
      }
      for (int u : members[root])
        for (int w : neighbours(u))
          if (!oriented[w]) queue.push_back(w);
    }
  }
  if (n > 0 && out[0] < 0)
    for (int& x : out) x = -x;
  return out;
}

Segmentation segment(const Image& img, const SegmentOptions& opts) {
  Segmentation seg;
  const CoefficientMatrix M = build_weights(img, opts.threshold);
  seg.problem = strip_problem(img, M, opts.agents);
  const AgentPartition part = build_partition(seg.problem);
  const StepSizes steps = async_step_sizes(part, M, opts.B, opts.sigma);
  DelaySchedule schedule(part, opts.B, derive_seed(opts.seed, {1}), opts.mode);
  const int n = M.n();
  const Matrix V0 = random_init(choose_rank(n), n, derive_seed(opts.seed, {2}));
  AsyncOptions aopts;
  aopts.max_iters = opts.max_iters;
  aopts.tol = opts.tol;
  seg.solve = run_async(seg.problem, part, steps, schedule, V0, aopts);
  const CutResult rounded = hyperplane_round(seg.solve.V, M, opts.trials, derive_seed(opts.seed, {3}));
  seg.signs = opts.align ? align_labels(img, M, opts.threshold, rounded.signs) : rounded.signs;
  seg.cut = cut_value(M, seg.signs);
  seg.mask.resize(n);
  for (int v = 0; v < n; ++v) seg.mask[v] = seg.signs[v] > 0 ? 0 : 255;
  return seg;
}

std::string encode_pgm(int width, int height, const std::vector<std::uint8_t>& pixels) {
  std::ostringstream os;
  os << "P2\n" << width << ' ' << height << "\n255\n";
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      os << int(pixels[r * width + c]) << (c + 1 < width ? ' ' : '\n');
  return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << bytes;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace distsdp
