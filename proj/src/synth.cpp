#include <fstream>
#include <random>
#include <stdexcept>

#include "pvrc/data.hpp"

namespace pvrc::data {

std::vector<Sample> synth_subspace_dataset(const SynthParams& p) {
  if (p.subspace_dim >= p.ambient_q)
    throw std::invalid_argument("synth: subspace_dim must be < ambient_q");
  if (p.per_class < p.subspace_dim + 1)
    throw std::invalid_argument("synth: per_class must be >= subspace_dim + 1");
  if (p.num_classes < 1 || p.noise_sigma < 0.0)
    throw std::invalid_argument("synth: bad parameters");

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
    return m;
  };

  // Class offsets are spread wide relative to the unit coefficient spread
  // so subspaces are well separated.
  constexpr double kOffsetSigma = 5.0;

  std::vector<Sample> samples;
  samples.reserve(static_cast<size_t>(p.num_classes) * p.per_class);
  for (int c = 0; c < p.num_classes; ++c) {
    const Eigen::VectorXd offset = kOffsetSigma * draw(p.ambient_q, 1);
    const Eigen::MatrixXd basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(draw(p.ambient_q, p.subspace_dim))
            .householderQ() *
        Eigen::MatrixXd::Identity(p.ambient_q, p.subspace_dim);
    for (int i = 0; i < p.per_class; ++i) {
      Sample s;
      s.class_id = c + 1;
      s.features = offset + basis * draw(p.subspace_dim, 1);
      if (p.noise_sigma > 0.0)
        s.features += p.noise_sigma * draw(p.ambient_q, 1);
      s.source_id = "synth:" + std::to_string(c + 1) + ":" + std::to_string(i);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

std::filesystem::path write_synth_dataset(const std::filesystem::path& stem,
                                          const SynthParams& params) {
  const auto samples = synth_subspace_dataset(params);
  const auto csv_path = std::filesystem::path(stem.string() + ".csv");
  const auto manifest_path = std::filesystem::path(stem.string() + ".manifest");
  write_csv(csv_path, samples);

  std::ofstream out(manifest_path);
  if (!out)
    throw std::runtime_error(manifest_path.string() + ": cannot open for write");
  out << "name " << stem.filename().string() << "\n";
  out << "kind csv\n";
  out << "csv " << csv_path.filename().string() << "\n";
  if (!out) throw std::runtime_error(manifest_path.string() + ": write failed");
  return manifest_path;
}

}  // namespace pvrc::data
