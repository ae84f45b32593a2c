#include "partgan/data.hpp"

#include "partgan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace partgan {

Tensor Dataset::gather(const std::vector<Eigen::Index>& indices) const {
  if (indices.empty()) throw std::invalid_argument("gather: empty index list");
  Eigen::Index s = images.size() / count();
  Tensor out(Shape{static_cast<Eigen::Index>(indices.size()), channels(), height(), width()});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    Eigen::Index idx = indices[i];
    if (idx < 0 || idx >= count()) throw std::out_of_range("gather: index " + std::to_string(idx));
    out.data().segment(static_cast<Eigen::Index>(i) * s, s) = images.data().segment(idx * s, s);
  }
  return out;
}

std::vector<int> Dataset::gather_labels(const std::vector<Eigen::Index>& indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (Eigen::Index idx : indices) out.push_back(labels.at(static_cast<std::size_t>(idx)));
  return out;
}

void validate_dataset(const Dataset& ds) {
  if (ds.images.rank() != 4) throw std::invalid_argument("dataset images must be [m, C, H, W]");
  if (ds.count() < 1) throw std::invalid_argument("dataset is empty");
  if (static_cast<Eigen::Index>(ds.labels.size()) != ds.count())
    throw std::invalid_argument("dataset has " + std::to_string(ds.count()) + " images but " +
                                std::to_string(ds.labels.size()) + " labels");
  if (ds.k < 1) throw std::invalid_argument("dataset class count must be positive");
  for (int l : ds.labels)
    if (l < 0 || l >= ds.k)
      throw std::invalid_argument("label " + std::to_string(l) + " outside [0, " + std::to_string(ds.k) + ")");
  if ((ds.images.data() < 0.0).any() || (ds.images.data() > 1.0).any())
    throw std::invalid_argument("dataset pixel values must lie in [0, 1]");
}

// ---- synthetic ----

std::vector<std::vector<double>> default_blob_means(const SyntheticSpec& spec) {
  std::vector<std::vector<double>> means;
  for (int j = 0; j < spec.k; ++j) {
    if (spec.kind == SyntheticKind::gaussian_blobs_1d) {
      double m = spec.k == 1 ? 0.0 : -1.0 + 2.0 * j / (spec.k - 1);
      means.push_back({m});
    } else {
      double a = 2.0 * M_PI * j / spec.k;
      means.push_back({std::cos(a), std::sin(a)});
    }
  }
  return means;
}

BlobMapping blob_mapping(const SyntheticSpec& spec) {
  auto means = spec.means.empty() ? default_blob_means(spec) : spec.means;
  double lo = means[0][0], hi = means[0][0];
  for (const auto& m : means)
    for (double v : m) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo - 5.0 * spec.stddev, hi + 5.0 * spec.stddev};
}

namespace {

Dataset make_blobs(const SyntheticSpec& spec) {
  auto means = spec.means.empty() ? default_blob_means(spec) : spec.means;
  if (static_cast<int>(means.size()) != spec.k)
    throw std::invalid_argument("blob means must list one mean per class");
  std::size_t dim = spec.kind == SyntheticKind::gaussian_blobs_1d ? 1 : 2;
  for (const auto& m : means)
    if (m.size() != dim) throw std::invalid_argument("blob mean dimension mismatch");

  BlobMapping map = blob_mapping(spec);
  double scale = 1.0 / (map.hi - map.lo);
  Eigen::Index m = spec.k * spec.per_class_n;
  Dataset ds;
  ds.k = spec.k;
  ds.images = Tensor(Shape{m, 1, 1, static_cast<Eigen::Index>(dim)});
  ds.labels.resize(static_cast<std::size_t>(m));
  Rng rng(spec.seed);
  Eigen::Index row = 0;
  for (int j = 0; j < spec.k; ++j) {
    for (Eigen::Index i = 0; i < spec.per_class_n; ++i, ++row) {
      ds.labels[static_cast<std::size_t>(row)] = j;
      for (std::size_t d = 0; d < dim; ++d) {
        double x = means[static_cast<std::size_t>(j)][d] + spec.stddev * rng.normal();
        ds.images[row * static_cast<Eigen::Index>(dim) + static_cast<Eigen::Index>(d)] =
            std::clamp((x - map.lo) * scale, 0.0, 1.0);
      }
    }
  }
  return ds;
}

// Four shape kinds rendered with +-1 px position jitter and per-image
// foreground intensity in [0.75, 0.95]. Coverage areas are deliberately
// distinct (thin cross < circle < square < bars) so per-channel mean
// intensity already separates the classes.
void render_shape(int kind, Eigen::Index s, double fg, int dx, int dy, double* img) {
  std::fill(img, img + s * s, 0.0);
  double c = (s - 1) / 2.0;
  Eigen::Index thick = std::max<Eigen::Index>(1, s / 8);
  Eigen::Index thin = std::max<Eigen::Index>(1, s / 16);
  Eigen::Index half = s / 4;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      double y = i - c - dy, x = j - c - dx;
      bool on = false;
      switch (kind) {
        case 0:  // filled square
          on = std::abs(y) <= half && std::abs(x) <= half;
          break;
        case 1:  // filled circle
          on = y * y + x * x <= double(half) * double(half);
          break;
        case 2:  // thin cross
          on = (std::abs(y) < thin && std::abs(x) <= half + 1) ||
               (std::abs(x) < thin && std::abs(y) <= half + 1);
          break;
        case 3:  // horizontal bars
          on = ((i + dy) / thick) % 2 == 0;
          break;
        default:
          break;
      }
      if (on) img[i * s + j] = fg;
    }
  }
}

Dataset make_shapes(const SyntheticSpec& spec) {
  if (spec.k > 4)
    throw std::invalid_argument("shape-images supports at most 4 classes, requested " +
                                std::to_string(spec.k));
  if (spec.image_size < 8) throw std::invalid_argument("shape-images requires image_size >= 8");
  Eigen::Index s = spec.image_size;
  Eigen::Index m = spec.k * spec.per_class_n;
  Dataset ds;
  ds.k = spec.k;
  ds.images = Tensor(Shape{m, 1, s, s});
  ds.labels.resize(static_cast<std::size_t>(m));
  Rng rng(spec.seed);
  Eigen::Index row = 0;
  for (int j = 0; j < spec.k; ++j) {
    for (Eigen::Index i = 0; i < spec.per_class_n; ++i, ++row) {
      ds.labels[static_cast<std::size_t>(row)] = j;
      int dx = static_cast<int>(rng.index(3)) - 1;
      int dy = static_cast<int>(rng.index(3)) - 1;
      double fg = 0.75 + 0.2 * rng.uniform();
      render_shape(j, s, fg, dx, dy, ds.images.data().data() + row * s * s);
    }
  }
  return ds;
}

}  // namespace

Dataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.k < 1) throw std::invalid_argument("synthetic spec needs k >= 1");
  if (spec.per_class_n < 1) throw std::invalid_argument("synthetic spec needs per_class_n >= 1");
  Dataset ds = spec.kind == SyntheticKind::shape_images ? make_shapes(spec) : make_blobs(spec);
  validate_dataset(ds);
  return ds;
}

// ---- IDX ----

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_u32_be(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

void write_u32_be(std::uint32_t v, std::ofstream& out) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

[[noreturn]] void bad_magic(const std::string& path, std::uint32_t want, std::uint32_t got) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "bad magic in %s: expected 0x%08x, found 0x%08x", path.c_str(), want, got);
  throw std::runtime_error(buf);
}

void check_len(const std::string& path, std::size_t want, std::size_t got) {
  if (got < want)
    throw std::runtime_error("truncated file " + path + ": expected " + std::to_string(want) +
                             " bytes, found " + std::to_string(got));
}

}  // namespace

Dataset read_idx(const std::string& images_path, const std::string& labels_path, bool pad_to_32) {
  auto ib = read_file(images_path);
  check_len(images_path, 16, ib.size());
  std::uint32_t magic = read_u32_be(ib.data());
  if (magic != 0x00000803u) bad_magic(images_path, 0x00000803u, magic);
  std::uint32_t count = read_u32_be(ib.data() + 4);
  std::uint32_t rows = read_u32_be(ib.data() + 8);
  std::uint32_t cols = read_u32_be(ib.data() + 12);
  std::size_t need = 16 + std::size_t(count) * rows * cols;
  check_len(images_path, need, ib.size());

  auto lb = read_file(labels_path);
  check_len(labels_path, 8, lb.size());
  std::uint32_t lmagic = read_u32_be(lb.data());
  if (lmagic != 0x00000801u) bad_magic(labels_path, 0x00000801u, lmagic);
  std::uint32_t lcount = read_u32_be(lb.data() + 4);
  check_len(labels_path, 8 + std::size_t(lcount), lb.size());
  if (lcount != count)
    throw std::runtime_error("count mismatch: " + images_path + " has " + std::to_string(count) +
                             " images but " + labels_path + " has " + std::to_string(lcount) + " labels");
  if (count == 0) throw std::runtime_error(images_path + " contains no images");

  Eigen::Index h = rows, w = cols;
  Eigen::Index oh = h, ow = w, pi = 0, pj = 0;
  if (pad_to_32 && (h < 32 || w < 32)) {
    oh = std::max<Eigen::Index>(h, 32);
    ow = std::max<Eigen::Index>(w, 32);
    pi = (oh - h) / 2;
    pj = (ow - w) / 2;
  }

  Dataset ds;
  ds.images = Tensor(Shape{static_cast<Eigen::Index>(count), 1, oh, ow});
  ds.labels.resize(count);
  int maxl = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const unsigned char* src = ib.data() + 16 + std::size_t(i) * rows * cols;
    double* dst = ds.images.data().data() + static_cast<Eigen::Index>(i) * oh * ow;
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c2 = 0; c2 < w; ++c2) dst[(r + pi) * ow + (c2 + pj)] = src[r * w + c2] / 255.0;
    int l = lb[8 + i];
    ds.labels[i] = l;
    maxl = std::max(maxl, l);
  }
  ds.k = maxl + 1;
  validate_dataset(ds);
  return ds;
}

void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path) {
  if (ds.channels() != 1) throw std::invalid_argument("write_idx supports single-channel datasets only");
  std::ofstream io(images_path, std::ios::binary);
  if (!io) throw std::runtime_error("cannot write " + images_path);
  write_u32_be(0x00000803u, io);
  write_u32_be(static_cast<std::uint32_t>(ds.count()), io);
  write_u32_be(static_cast<std::uint32_t>(ds.height()), io);
  write_u32_be(static_cast<std::uint32_t>(ds.width()), io);
  for (Eigen::Index i = 0; i < ds.images.size(); ++i) {
    unsigned char b = static_cast<unsigned char>(std::lround(255.0 * ds.images[i]));
    io.put(static_cast<char>(b));
  }
  std::ofstream lo(labels_path, std::ios::binary);
  if (!lo) throw std::runtime_error("cannot write " + labels_path);
  write_u32_be(0x00000801u, lo);
  write_u32_be(static_cast<std::uint32_t>(ds.count()), lo);
  for (int l : ds.labels) lo.put(static_cast<char>(static_cast<unsigned char>(l)));
}

// ---- CIFAR binary ----

Dataset read_cifar_binary(const std::vector<std::string>& paths) {
  if (paths.empty()) throw std::invalid_argument("read_cifar_binary: no input files");
  constexpr std::size_t kRecord = 3073;
  std::vector<unsigned char> all;
  for (const auto& p : paths) {
    auto b = read_file(p);
    if (b.size() % kRecord != 0)
      throw std::runtime_error("truncated file " + p + ": length " + std::to_string(b.size()) +
                               " is not divisible by 3073 (last full record ends at byte offset " +
                               std::to_string((b.size() / kRecord) * kRecord) + ")");
    all.insert(all.end(), b.begin(), b.end());
  }
  std::size_t m = all.size() / kRecord;
  if (m == 0) throw std::runtime_error("cifar input contains no records");

  Dataset ds;
  ds.images = Tensor(Shape{static_cast<Eigen::Index>(m), 3, 32, 32});
  ds.labels.resize(m);
  int maxl = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const unsigned char* rec = all.data() + i * kRecord;
    int l = rec[0];
    ds.labels[i] = l;
    maxl = std::max(maxl, l);
    double* dst = ds.images.data().data() + static_cast<Eigen::Index>(i) * 3 * 1024;
    for (Eigen::Index t = 0; t < 3072; ++t) dst[t] = rec[1 + t] / 255.0;
  }
  ds.k = maxl + 1;
  validate_dataset(ds);
  return ds;
}

void write_cifar_binary(const Dataset& ds, const std::string& path) {
  if (ds.channels() != 3 || ds.height() != 32 || ds.width() != 32)
    throw std::invalid_argument("write_cifar_binary requires [m, 3, 32, 32] datasets");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index i = 0; i < ds.count(); ++i) {
    out.put(static_cast<char>(static_cast<unsigned char>(ds.labels[static_cast<std::size_t>(i)])));
    const double* src = ds.images.data().data() + i * 3 * 1024;
    for (Eigen::Index t = 0; t < 3072; ++t)
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * src[t]))));
  }
}

}  // namespace partgan
