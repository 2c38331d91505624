#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pvrc/baselines.hpp"
#include "pvrc/classifier.hpp"
#include "pvrc/data.hpp"
#include "pvrc/pvrc.hpp"

namespace pvrc::eval {

enum class ProtocolKind { leave_one_out, first_n };

struct Protocol {
  ProtocolKind kind = ProtocolKind::leave_one_out;
  int n = 0;  // first_n only
};

struct ClassifierSpec {
  std::string name;  // nn | cm | lrc | crc | src | tptssr | pvrc
  baselines::SrcParams src;
  int tptssr_k = 1;
  PvrcNorm pvrc_norm = PvrcNorm::derived;
};

const std::vector<std::string>& classifier_names();

struct TimingStats {
  double mean_s = 0.0;
  double median_s = 0.0;
  double p95_s = 0.0;
};

struct ClassifierResult {
  std::string name;
  double recognition_rate = 0.0;  // percent
  int correct = 0;
  int total = 0;
  TimingStats timing;
  std::map<std::string, long long> flags;
  std::vector<int> predictions;                  // per test query
  std::map<std::pair<int, int>, int> confusion;  // (truth, predicted) -> count
};

struct EvalReport {
  std::string dataset;
  Protocol protocol;
  std::string environment;
  std::vector<ClassifierResult> classifiers;
};

EvalReport run_leave_one_out(const std::string& dataset_name,
                             const std::vector<data::Sample>& samples,
                             const std::vector<ClassifierSpec>& specs,
                             int threads = 1);

EvalReport run_first_n(const std::string& dataset_name,
                       const std::vector<data::Sample>& samples, int n,
                       const std::vector<ClassifierSpec>& specs,
                       int threads = 1);

EvalReport run_protocol(const std::string& dataset_name,
                        const std::vector<data::Sample>& samples,
                        const Protocol& protocol,
                        const std::vector<ClassifierSpec>& specs,
                        int threads = 1);

// One report per k; the best RR over the sweep is the headline number.
std::vector<std::pair<int, EvalReport>> sweep_tptssr(
    const std::string& dataset_name, const std::vector<data::Sample>& samples,
    const Protocol& protocol, int k_from, int k_to, int threads = 1);

std::string to_json(const EvalReport& report);
std::string to_csv(const EvalReport& report);
// Human-readable classifier x RR table.
std::string to_table(const EvalReport& report);

std::string environment_note();

Dataset make_dataset(const std::vector<data::Sample>& samples);

}  // namespace pvrc::eval
