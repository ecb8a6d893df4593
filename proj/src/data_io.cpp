#include "bnnmi/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <sstream>
#include <tuple>

#include "bnnmi/errors.hpp"
#include "bnnmi/random.hpp"

namespace bnnmi::io {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw IdxError(IdxError::Kind::Truncated,
                   "truncated IDX header in " + path.string());
  }
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

void check_magic(std::uint32_t magic, std::uint32_t expected,
                 const std::filesystem::path& path) {
  if (magic != expected) {
    std::ostringstream msg;
    msg << "wrong IDX magic 0x" << std::hex << std::setw(8) << std::setfill('0')
        << magic << " in " << path.string() << " (expected 0x" << std::setw(8)
        << expected << ")";
    throw IdxError(IdxError::Kind::WrongMagic, msg.str());
  }
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  check_magic(read_be32(bytes, 0, path), kIdxImagesMagic, path);
  IdxImages images;
  images.count = read_be32(bytes, 4, path);
  images.rows = read_be32(bytes, 8, path);
  images.cols = read_be32(bytes, 12, path);
  const std::size_t payload = images.count * images.rows * images.cols;
  if (bytes.size() - 16 < payload) {
    std::ostringstream msg;
    msg << "truncated IDX image payload in " << path.string() << ": header says "
        << images.count << " images of " << images.rows << "x" << images.cols
        << " but only " << bytes.size() - 16 << " bytes follow";
    throw IdxError(IdxError::Kind::Truncated, msg.str());
  }
  images.pixels.assign(bytes.begin() + 16,
                       bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
  return images;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  check_magic(read_be32(bytes, 0, path), kIdxLabelsMagic, path);
  const std::size_t count = read_be32(bytes, 4, path);
  if (bytes.size() - 8 < count) {
    std::ostringstream msg;
    msg << "truncated IDX label payload in " << path.string() << ": header says "
        << count << " labels but only " << bytes.size() - 8 << " bytes follow";
    throw IdxError(IdxError::Kind::Truncated, msg.str());
  }
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

void write_idx_images(const IdxImages& images, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  put_be32(out, kIdxImagesMagic);
  put_be32(out, static_cast<std::uint32_t>(images.count));
  put_be32(out, static_cast<std::uint32_t>(images.rows));
  put_be32(out, static_cast<std::uint32_t>(images.cols));
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_idx_labels(const std::vector<std::uint8_t>& labels,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

LabeledDataset read_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, bool transpose) {
  const auto images = read_idx_images(images_path);
  const auto labels = read_idx_labels(labels_path);
  if (images.count != labels.size()) {
    std::ostringstream msg;
    msg << "IDX count mismatch: " << images.count << " images in "
        << images_path.string() << " but " << labels.size() << " labels in "
        << labels_path.string();
    throw IdxError(IdxError::Kind::CountMismatch, msg.str());
  }
  if (images.count == 0) {
    throw IdxError(IdxError::Kind::CountMismatch, "IDX files contain no items");
  }
  LabeledDataset ds;
  ds.name = images_path.stem().string();
  ds.dim = images.rows * images.cols;
  ds.features.resize(images.count * ds.dim);
  for (std::size_t n = 0; n < images.count; ++n) {
    const std::uint8_t* src = images.pixels.data() + n * ds.dim;
    double* dst = ds.features.data() + n * ds.dim;
    for (std::size_t r = 0; r < images.rows; ++r) {
      for (std::size_t c = 0; c < images.cols; ++c) {
        const std::size_t to = transpose ? c * images.rows + r : r * images.cols + c;
        dst[to] = src[r * images.cols + c] / 255.0;
      }
    }
  }
  ds.labels.assign(labels.begin(), labels.end());
  ds.classes = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  return ds;
}

void write_idx(const LabeledDataset& dataset, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  if (rows * cols != dataset.dim) {
    throw DomainError("write_idx: rows x cols does not match feature dimension");
  }
  IdxImages images{dataset.size(), rows, cols, {}};
  images.pixels.reserve(dataset.features.size());
  for (const double v : dataset.features) {
    images.pixels.push_back(
        static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  std::vector<std::uint8_t> labels;
  labels.reserve(dataset.size());
  for (const auto y : dataset.labels) {
    if (y > 255) throw DomainError("write_idx: label does not fit in a byte");
    labels.push_back(static_cast<std::uint8_t>(y));
  }
  write_idx_images(images, images_path);
  write_idx_labels(labels, labels_path);
}

LabeledDataset synth_blobs(std::size_t classes, std::size_t n_per_class,
                           std::size_t dim, double spread, std::uint64_t seed,
                           double radius) {
  if (classes < 2 || n_per_class < 1 || dim < 1) {
    throw DomainError("synth_blobs: need classes >= 2, n_per_class >= 1, dim >= 1");
  }
  if (!(spread >= 0.0) || !(radius > 0.0)) {
    throw DomainError("synth_blobs: spread must be >= 0 and radius > 0");
  }
  std::vector<double> centers(classes * dim, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t axis = (c / 2) % dim;
    const double shell = 1.0 + static_cast<double>(c / (2 * dim));
    centers[c * dim + axis] = (c % 2 == 0 ? 1.0 : -1.0) * radius * shell;
  }
  LabeledDataset ds;
  ds.name = "blobs";
  ds.classes = classes;
  ds.dim = dim;
  ds.features.reserve(classes * n_per_class * dim);
  ds.labels.reserve(classes * n_per_class);
  Rng rng(seed);
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t d = 0; d < dim; ++d) {
        ds.features.push_back(centers[c * dim + d] + spread * rng.normal());
      }
      ds.labels.push_back(c);
    }
  }
  return ds;
}

LabeledDataset subsample(const LabeledDataset& dataset, std::size_t count,
                         std::uint64_t seed) {
  if (count >= dataset.size()) return dataset;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + rng.below(order.size() - i)]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  return dataset.subset(order);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

template <typename Int>
bool parse_int(const std::string& text, Int& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& field : split_commas(text)) {
    double v = 0.0;
    if (!parse_double(field, v)) {
      throw ParseError("malformed number '" + field + "' in list '" + text + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw ParseError("empty number list");
  return values;
}

void write_curves(std::vector<LearningCurveRecord> records,
                  const std::filesystem::path& path) {
  if (records.empty()) throw DomainError("write_curves: no records");
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.strategy, a.seed, a.iteration) <
           std::tie(b.strategy, b.seed, b.iteration);
  });
  auto out = open_for_write(path);
  out << kCurvesHeader << '\n';
  for (const auto& r : records) {
    out << r.strategy << ',' << r.seed << ',' << r.iteration << ','
        << r.labeled_count << ',' << std::setprecision(17) << r.test_accuracy
        << ',' << std::fixed << std::setprecision(6) << r.wall_time_s
        << std::defaultfloat << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<LearningCurveRecord> read_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCurvesHeader) {
    throw ParseError("unexpected curve CSV header in " + path.string());
  }
  std::vector<LearningCurveRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_commas(line);
    LearningCurveRecord r;
    if (f.size() != 6 || f[0].empty() || !parse_int(f[1], r.seed) ||
        !parse_int(f[2], r.iteration) || !parse_int(f[3], r.labeled_count) ||
        !parse_double(f[4], r.test_accuracy) || !parse_double(f[5], r.wall_time_s)) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": malformed curve row");
    }
    r.strategy = f[0];
    records.push_back(std::move(r));
  }
  return records;
}

SampleBatch read_samples_csv(const std::filesystem::path& path, double tolerance) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open samples file " + path.string());
  std::vector<double> values;
  std::size_t classes = 0;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    row.clear();
    bool numeric = true;
    for (const auto& field : fields) {
      double v = 0.0;
      if (!parse_double(field, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!numeric) {
      if (classes == 0 && values.empty()) {
        classes = fields.size();  // header line
        continue;
      }
      throw ParseError(where + ": non-numeric field");
    }
    if (classes == 0) classes = row.size();
    if (row.size() != classes) {
      throw ParseError(where + ": expected " + std::to_string(classes) + " columns");
    }
    try {
      validate_simplex_row(row, tolerance);
    } catch (const DomainError& e) {
      throw ParseError(where + ": " + e.what());
    }
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (const double v : row) values.push_back(v / sum);
  }
  if (values.empty()) throw ParseError(path.string() + ": no sample rows");
  if (classes < 2) throw ParseError(path.string() + ": need at least two columns");
  return SampleBatch(classes, std::move(values));
}

void write_samples_csv(const SampleBatch& batch, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << std::setprecision(17);
  for (std::size_t m = 0; m < batch.size(); ++m) {
    const auto row = batch.row(m);
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << (k ? "," : "") << row[k];
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_scores(const std::vector<ScoreRow>& rows,
                  const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "iteration,pool_index,score,fallback\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.pool_index << ',' << r.score << ','
        << (r.fallback ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace bnnmi::io
