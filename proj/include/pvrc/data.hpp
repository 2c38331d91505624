#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pvrc::data {

struct Sample {
  int class_id = 0;
  Eigen::VectorXd features;
  std::string source_id;
};

// Row-major, channel-interleaved pixel grid. Values stay in [0, 255]
// for decoded images.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;

  double at(int x, int y, int c) const {
    return pixels[static_cast<size_t>((y * width + x) * channels + c)];
  }
  double& at(int x, int y, int c) {
    return pixels[static_cast<size_t>((y * width + x) * channels + c)];
  }
};

enum class ColorMode { gray, rgb_concat };

struct CropRect {
  int x = 0, y = 0, width = 0, height = 0;
};

struct PreprocessParams {
  int target_width = 0;
  int target_height = 0;
  ColorMode mode = ColorMode::gray;
  std::optional<CropRect> crop;
};

// Netpbm P2/P3/P5/P6, bit-exact, maxval up to 65535.
Image load_pnm(const std::filesystem::path& path);
// 8-bit grayscale and RGB PNG (palette expanded, alpha stripped).
Image load_png(const std::filesystem::path& path);
// Dispatch on the magic bytes.
Image load_image(const std::filesystem::path& path);

// Optional crop, bilinear resize with half-pixel centers, then luma
// grayscale (0.299 / 0.587 / 0.114) when the mode asks for gray.
Image preprocess(const Image& img, const PreprocessParams& params);

// Column concatenation: for each channel block, columns top to bottom,
// left to right. rgb_concat emits the R block, then G, then B.
Eigen::VectorXd vectorize(const Image& img, ColorMode mode);
Image devectorize(const Eigen::VectorXd& features, int width, int height,
                  ColorMode mode);

struct ManifestClass {
  int class_id = 0;
  std::vector<std::string> files;  // relative to the manifest
};

struct DatasetManifest {
  std::string name;
  enum class Kind { image_dir, csv } kind = Kind::image_dir;
  PreprocessParams preprocess;
  std::string csv_file;  // kind == csv
  std::vector<ManifestClass> classes;
  std::filesystem::path base_dir;
};

DatasetManifest parse_manifest(const std::filesystem::path& path);
std::vector<Sample> load_samples(const DatasetManifest& manifest);
std::vector<Sample> load_manifest(const std::filesystem::path& path);

// CSV rows: class_id, f1, ..., fq. A non-numeric first line is treated
// as a header and skipped.
std::vector<Sample> load_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path,
               const std::vector<Sample>& samples);

struct SynthParams {
  int num_classes = 10;
  int per_class = 6;
  int subspace_dim = 3;
  int ambient_q = 50;
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;
};

// Each class lives on its own seeded random affine subspace; samples are
// basis combinations plus isotropic gaussian noise. Same seed, same bits.
std::vector<Sample> synth_subspace_dataset(const SynthParams& params);

// Materializes the synthetic dataset as <stem>.csv plus a manifest
// <stem>.manifest referencing it. Returns the manifest path.
std::filesystem::path write_synth_dataset(const std::filesystem::path& stem,
                                          const SynthParams& params);

}  // namespace pvrc::data
