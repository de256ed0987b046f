#include "ratiotv/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ratiotv {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

std::vector<double> parse_csv_line(const std::string& line, const std::string& path) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::runtime_error("bad numeric field in " + path + ": '" + tok + "'");
    }
  }
  return vals;
}

void write_matrix_rows(std::ofstream& f, const ImageXd& img, const char* fmt) {
  char buf[64];
  for (Index i = 0; i < img.rows(); ++i) {
    for (Index j = 0; j < img.cols(); ++j) {
      std::snprintf(buf, sizeof buf, fmt, img(i, j));
      f << (j ? "," : "") << buf;
    }
    f << '\n';
  }
}

ImageXd read_matrix_rows(std::ifstream& f, Index m, Index n, const std::string& path) {
  ImageXd img(m, n);
  std::string line;
  for (Index i = 0; i < m; ++i) {
    if (!std::getline(f, line)) throw std::runtime_error("truncated file: " + path);
    const auto vals = parse_csv_line(line, path);
    if (Index(vals.size()) != n) throw std::runtime_error("row width mismatch in " + path);
    for (Index j = 0; j < n; ++j) img(i, j) = vals[size_t(j)];
  }
  return img;
}

std::pair<Index, Index> read_dims(std::ifstream& f, const std::string& path) {
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty file: " + path);
  const auto dims = parse_csv_line(line, path);
  if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1) throw std::runtime_error("bad header in " + path);
  return {Index(dims[0]), Index(dims[1])};
}

constexpr char kImageMagic[8] = {'R', 'T', 'V', 'I', 'M', 'G', '0', '1'};

}  // namespace

void write_image_csv(const std::string& path, const ImageXd& img) {
  auto f = open_out(path);
  f << img.rows() << ',' << img.cols() << '\n';
  write_matrix_rows(f, img, "%.17g");
}

ImageXd read_image_csv(const std::string& path) {
  auto f = open_in(path);
  const auto [m, n] = read_dims(f, path);
  return read_matrix_rows(f, m, n, path);
}

void write_image_binary(const std::string& path, const ImageXd& img) {
  auto f = open_out(path, std::ios::binary);
  f.write(kImageMagic, sizeof kImageMagic);
  const std::int64_t dims[2] = {img.rows(), img.cols()};
  f.write(reinterpret_cast<const char*>(dims), sizeof dims);
  // row-major on disk
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = img;
  f.write(reinterpret_cast<const char*>(rm.data()), std::streamsize(sizeof(double)) * rm.size());
}

ImageXd read_image_binary(const std::string& path) {
  auto f = open_in(path, std::ios::binary);
  char magic[8];
  f.read(magic, sizeof magic);
  if (!f || std::memcmp(magic, kImageMagic, sizeof magic) != 0)
    throw std::runtime_error("not an image binary: " + path);
  std::int64_t dims[2];
  f.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!f || dims[0] < 1 || dims[1] < 1) throw std::runtime_error("bad dims in " + path);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(dims[0], dims[1]);
  f.read(reinterpret_cast<char*>(rm.data()), std::streamsize(sizeof(double)) * rm.size());
  if (!f) throw std::runtime_error("truncated file: " + path);
  return rm;
}

ImageXd read_image(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_image_csv(path);
  return read_image_binary(path);
}

void write_mask_csv(const std::string& path, const FrequencyMask& mask) {
  auto f = open_out(path);
  f << mask.rows() << ',' << mask.cols() << '\n';
  write_matrix_rows(f, mask.indicator(), "%.0f");
}

FrequencyMask read_mask_csv(const std::string& path) {
  auto f = open_in(path);
  const auto [m, n] = read_dims(f, path);
  const ImageXd img = read_matrix_rows(f, m, n, path);
  FrequencyMask mask;
  mask.keep = img.array() != 0.0;
  return mask;
}

void write_sinogram_csv(const std::string& path, const Sinogram& sino) {
  auto f = open_out(path);
  f << sino.n_detectors() << ',' << sino.n_angles() << '\n';
  char buf[64];
  for (size_t a = 0; a < sino.angles.size(); ++a) {
    std::snprintf(buf, sizeof buf, "%.17g", sino.angles[a]);
    f << (a ? "," : "") << buf;
  }
  f << '\n';
  write_matrix_rows(f, sino.values, "%.17g");
}

Sinogram read_sinogram_csv(const std::string& path) {
  auto f = open_in(path);
  const auto [nd, na] = read_dims(f, path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("truncated file: " + path);
  Sinogram sino;
  sino.angles = parse_csv_line(line, path);
  if (Index(sino.angles.size()) != na) throw std::runtime_error("angle count mismatch in " + path);
  sino.values = read_matrix_rows(f, nd, na, path);
  return sino;
}

}  // namespace ratiotv
