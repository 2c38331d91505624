#include "pvrc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace pvrc::eval {

namespace {

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------
// Classifier engines: fit once, predict many. Engines whose per-class
// models are independent support cheap single-class refits, which is all
// leave-one-out needs.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual void fit(const Dataset& d) = 0;
  virtual ClassifierDecision predict(const Eigen::VectorXd& x) const = 0;
  virtual bool class_local() const { return false; }
  virtual void refit_class(size_t /*index*/, const ClassData& /*cls*/) {
    throw std::logic_error("refit_class on a pooled engine");
  }
  virtual void fill_flags(ClassifierResult& /*r*/) const {}
};

class NnEngine : public Engine {
 public:
  void fit(const Dataset& d) override { data_ = d; }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    return baselines::nn_classify(x, data_);
  }
  bool class_local() const override { return true; }
  void refit_class(size_t i, const ClassData& cls) override {
    data_.classes.at(i) = cls;
  }

 private:
  Dataset data_;
};

class CmEngine : public Engine {
 public:
  void fit(const Dataset& d) override { data_ = d; }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    return baselines::cm_classify(x, data_);
  }
  bool class_local() const override { return true; }
  void refit_class(size_t i, const ClassData& cls) override {
    data_.classes.at(i) = cls;
  }

 private:
  Dataset data_;
};

class LrcEngine : public Engine {
 public:
  void fit(const Dataset& d) override { data_ = d; }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    return baselines::lrc_classify(x, data_);
  }
  bool class_local() const override { return true; }
  void refit_class(size_t i, const ClassData& cls) override {
    data_.classes.at(i) = cls;
  }

 private:
  Dataset data_;
};

class PvrcEngine : public Engine {
 public:
  explicit PvrcEngine(PvrcNorm norm) : norm_(norm) {}

  void fit(const Dataset& d) override {
    models_.clear();
    for (const auto& c : d.classes)
      models_.push_back(train_class(c.class_id, c.columns));
  }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    bool equal = true;
    for (const auto& m : models_)
      if (m.prototype_count() != models_.front().prototype_count()) equal = false;
    ClassifierDecision dec;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : models_) {
      const PvrcScore s = score(x, m);
      const double v = comparable_score(s, m.prototype_count(), equal, norm_);
      dec.per_class_scores.emplace_back(m.class_id, v);
      if (v < best) {
        best = v;
        dec.chosen_class = m.class_id;
      }
    }
    return dec;
  }
  bool class_local() const override { return true; }
  void refit_class(size_t i, const ClassData& cls) override {
    models_.at(i) = train_class(cls.class_id, cls.columns);
  }
  void fill_flags(ClassifierResult& r) const override {
    long long overcomplete = 0;
    long long regularized = 0;
    for (const auto& m : models_) {
      if (m.prototype_count() > m.dim()) ++overcomplete;
      if (m.regularization_applied > 0.0) ++regularized;
    }
    if (overcomplete > 0) r.flags["pvrc_overcomplete_classes"] = overcomplete;
    if (regularized > 0) r.flags["pvrc_regularized_classes"] = regularized;
  }

 private:
  PvrcNorm norm_;
  std::vector<ClassModel> models_;
};

class CrcEngine : public Engine {
 public:
  void fit(const Dataset& d) override { model_ = baselines::crc_train(d); }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    return baselines::crc_classify(x, model_);
  }

 private:
  baselines::CrcModel model_;
};

class SrcEngine : public Engine {
 public:
  explicit SrcEngine(const baselines::SrcParams& params) : params_(params) {}
  void fit(const Dataset& d) override {
    model_ = baselines::src_train(d, params_);
  }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    ClassifierDecision dec = baselines::src_classify(x, model_);
    if (!dec.converged) ++nonconverged_;
    return dec;
  }
  void fill_flags(ClassifierResult& r) const override {
    r.flags["src_nonconverged"] = nonconverged_.load();
  }

 private:
  baselines::SrcParams params_;
  baselines::SrcModel model_;
  mutable std::atomic<long long> nonconverged_{0};
};

class TptssrEngine : public Engine {
 public:
  explicit TptssrEngine(int k) : k_(k) {}
  void fit(const Dataset& d) override {
    model_ = baselines::tptssr_train(d);
    if (k_ < 1 || k_ > model_.pooled.columns.cols())
      throw std::invalid_argument("tptssr: k out of range for this dataset");
  }
  ClassifierDecision predict(const Eigen::VectorXd& x) const override {
    return baselines::tptssr_classify(x, model_, k_);
  }

 private:
  int k_;
  baselines::TptssrModel model_;
};

std::unique_ptr<Engine> make_engine(const ClassifierSpec& spec) {
  if (spec.name == "nn") return std::make_unique<NnEngine>();
  if (spec.name == "cm") return std::make_unique<CmEngine>();
  if (spec.name == "lrc") return std::make_unique<LrcEngine>();
  if (spec.name == "crc") return std::make_unique<CrcEngine>();
  if (spec.name == "src") return std::make_unique<SrcEngine>(spec.src);
  if (spec.name == "tptssr") return std::make_unique<TptssrEngine>(spec.tptssr_k);
  if (spec.name == "pvrc") return std::make_unique<PvrcEngine>(spec.pvrc_norm);
  std::string valid;
  for (const auto& n : classifier_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown classifier '" + spec.name +
                              "'; valid names: " + valid);
}

// ---------------------------------------------------------------------

TimingStats summarize(std::vector<double> seconds) {
  TimingStats t;
  if (seconds.empty()) return t;
  std::sort(seconds.begin(), seconds.end());
  double sum = 0.0;
  for (double s : seconds) sum += s;
  t.mean_s = sum / static_cast<double>(seconds.size());
  t.median_s = seconds[seconds.size() / 2];
  const size_t idx = static_cast<size_t>(0.95 * static_cast<double>(seconds.size() - 1));
  t.p95_s = seconds[idx];
  return t;
}

double timed_predict(const Engine& engine, const Eigen::VectorXd& x,
                     int* prediction) {
  const auto t0 = Clock::now();
  const ClassifierDecision dec = engine.predict(x);
  const auto t1 = Clock::now();
  if (prediction) *prediction = dec.chosen_class;
  return std::chrono::duration<double>(t1 - t0).count();
}

constexpr int kMinTimedQueries = 30;
constexpr int kMaxTimedQueries = 300;

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void tally(ClassifierResult& result, const std::vector<int>& truths,
           const std::vector<int>& predictions) {
  result.predictions = predictions;
  result.total = static_cast<int>(truths.size());
  result.correct = 0;
  for (size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == predictions[i]) ++result.correct;
    ++result.confusion[{truths[i], predictions[i]}];
  }
  result.recognition_rate =
      result.total == 0 ? 0.0
                        : 100.0 * result.correct / static_cast<double>(result.total);
}

ClassData drop_column(const ClassData& cls, Eigen::Index j) {
  ClassData out;
  out.class_id = cls.class_id;
  out.columns.resize(cls.columns.rows(), cls.columns.cols() - 1);
  Eigen::Index at = 0;
  for (Eigen::Index c = 0; c < cls.columns.cols(); ++c)
    if (c != j) out.columns.col(at++) = cls.columns.col(c);
  return out;
}

ClassifierResult eval_first_n(const ClassifierSpec& spec, const Dataset& train,
                              const std::vector<int>& truths,
                              const std::vector<Eigen::VectorXd>& tests,
                              int threads) {
  auto engine = make_engine(spec);
  engine->fit(train);

  std::vector<int> predictions(truths.size(), -1);
  parallel_for(static_cast<int>(tests.size()), threads, [&](int i) {
    predictions[static_cast<size_t>(i)] =
        engine->predict(tests[static_cast<size_t>(i)]).chosen_class;
  });

  // Timing is always measured on a single thread: warm-up query first,
  // then at least kMinTimedQueries measurements, cycling if needed.
  std::vector<double> times;
  if (!tests.empty()) {
    engine->predict(tests.front());
    const int measured =
        std::max(kMinTimedQueries,
                 std::min<int>(static_cast<int>(tests.size()), kMaxTimedQueries));
    times.reserve(static_cast<size_t>(measured));
    for (int i = 0; i < measured; ++i)
      times.push_back(timed_predict(
          *engine, tests[static_cast<size_t>(i) % tests.size()], nullptr));
  }

  ClassifierResult result;
  result.name = spec.name;
  tally(result, truths, predictions);
  result.timing = summarize(std::move(times));
  engine->fill_flags(result);
  return result;
}

ClassifierResult eval_leave_one_out(const ClassifierSpec& spec,
                                    const Dataset& full) {
  auto engine = make_engine(spec);
  std::vector<int> truths;
  std::vector<int> predictions;
  std::vector<double> times;

  if (engine->class_local()) {
    engine->fit(full);
    bool warmed = false;
    for (size_t ci = 0; ci < full.classes.size(); ++ci) {
      const ClassData& cls = full.classes[ci];
      for (Eigen::Index j = 0; j < cls.columns.cols(); ++j) {
        engine->refit_class(ci, drop_column(cls, j));
        const Eigen::VectorXd x = cls.columns.col(j);
        if (!warmed) {
          engine->predict(x);
          warmed = true;
        }
        int pred = -1;
        times.push_back(timed_predict(*engine, x, &pred));
        truths.push_back(cls.class_id);
        predictions.push_back(pred);
      }
      engine->refit_class(ci, cls);
    }
  } else {
    bool warmed = false;
    for (size_t ci = 0; ci < full.classes.size(); ++ci) {
      const ClassData& cls = full.classes[ci];
      for (Eigen::Index j = 0; j < cls.columns.cols(); ++j) {
        Dataset reduced = full;
        reduced.classes[ci] = drop_column(cls, j);
        engine->fit(reduced);
        const Eigen::VectorXd x = cls.columns.col(j);
        if (!warmed) {
          engine->predict(x);
          warmed = true;
        }
        int pred = -1;
        times.push_back(timed_predict(*engine, x, &pred));
        truths.push_back(cls.class_id);
        predictions.push_back(pred);
      }
    }
  }

  // Top up the timing sample on the final fold's model if the dataset is
  // tiny; tallies are unaffected.
  if (!truths.empty()) {
    const Eigen::VectorXd x = full.classes.back().columns.rightCols(1);
    while (times.size() < static_cast<size_t>(kMinTimedQueries))
      times.push_back(timed_predict(*engine, x, nullptr));
  }

  ClassifierResult result;
  result.name = spec.name;
  tally(result, truths, predictions);
  result.timing = summarize(std::move(times));
  engine->fill_flags(result);
  return result;
}

std::string protocol_name(const Protocol& p) {
  return p.kind == ProtocolKind::leave_one_out ? "leave_one_out" : "first_n";
}

}  // namespace

const std::vector<std::string>& classifier_names() {
  static const std::vector<std::string> names = {"nn",  "cm",  "lrc", "crc",
                                                 "src", "tptssr", "pvrc"};
  return names;
}

Dataset make_dataset(const std::vector<data::Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("make_dataset: no samples");
  std::vector<int> ids;
  for (const auto& s : samples)
    if (std::find(ids.begin(), ids.end(), s.class_id) == ids.end())
      ids.push_back(s.class_id);
  std::sort(ids.begin(), ids.end());

  Dataset d;
  const Eigen::Index q = samples.front().features.size();
  for (int id : ids) {
    ClassData cls;
    cls.class_id = id;
    int count = 0;
    for (const auto& s : samples)
      if (s.class_id == id) ++count;
    cls.columns.resize(q, count);
    Eigen::Index at = 0;
    for (const auto& s : samples) {
      if (s.class_id != id) continue;
      if (s.features.size() != q)
        throw std::invalid_argument("make_dataset: inconsistent dimensions");
      cls.columns.col(at++) = s.features;
    }
    d.classes.push_back(std::move(cls));
  }
  return d;
}

EvalReport run_leave_one_out(const std::string& dataset_name,
                             const std::vector<data::Sample>& samples,
                             const std::vector<ClassifierSpec>& specs,
                             int threads) {
  (void)threads;  // leave-one-out folds share mutable state; runs serial
  const Dataset full = make_dataset(samples);
  for (const auto& c : full.classes)
    if (c.columns.cols() < 3)
      throw std::invalid_argument(
          "leave-one-out needs >= 3 samples per class; class " +
          std::to_string(c.class_id) + " has " +
          std::to_string(c.columns.cols()));

  EvalReport report;
  report.dataset = dataset_name;
  report.protocol = {ProtocolKind::leave_one_out, 0};
  report.environment = environment_note();
  for (const auto& spec : specs)
    report.classifiers.push_back(eval_leave_one_out(spec, full));
  return report;
}

EvalReport run_first_n(const std::string& dataset_name,
                       const std::vector<data::Sample>& samples, int n,
                       const std::vector<ClassifierSpec>& specs, int threads) {
  if (n < 2)
    throw std::invalid_argument("first-n needs n >= 2 (two prototypes minimum)");
  const Dataset full = make_dataset(samples);

  Dataset train;
  std::vector<int> truths;
  std::vector<Eigen::VectorXd> tests;
  for (const auto& c : full.classes) {
    if (c.columns.cols() <= n)
      throw std::invalid_argument("first-n with n=" + std::to_string(n) +
                                  " leaves no test samples for class " +
                                  std::to_string(c.class_id));
    ClassData t;
    t.class_id = c.class_id;
    t.columns = c.columns.leftCols(n);
    train.classes.push_back(std::move(t));
    for (Eigen::Index j = n; j < c.columns.cols(); ++j) {
      truths.push_back(c.class_id);
      tests.push_back(c.columns.col(j));
    }
  }

  EvalReport report;
  report.dataset = dataset_name;
  report.protocol = {ProtocolKind::first_n, n};
  report.environment = environment_note();
  for (const auto& spec : specs)
    report.classifiers.push_back(
        eval_first_n(spec, train, truths, tests, threads));
  return report;
}

EvalReport run_protocol(const std::string& dataset_name,
                        const std::vector<data::Sample>& samples,
                        const Protocol& protocol,
                        const std::vector<ClassifierSpec>& specs, int threads) {
  if (protocol.kind == ProtocolKind::leave_one_out)
    return run_leave_one_out(dataset_name, samples, specs, threads);
  return run_first_n(dataset_name, samples, protocol.n, specs, threads);
}

std::vector<std::pair<int, EvalReport>> sweep_tptssr(
    const std::string& dataset_name, const std::vector<data::Sample>& samples,
    const Protocol& protocol, int k_from, int k_to, int threads) {
  if (k_from < 1 || k_to < k_from)
    throw std::invalid_argument("sweep_tptssr: bad k range");
  std::vector<std::pair<int, EvalReport>> out;
  for (int k = k_from; k <= k_to; ++k) {
    ClassifierSpec spec;
    spec.name = "tptssr";
    spec.tptssr_k = k;
    out.emplace_back(k,
                     run_protocol(dataset_name, samples, protocol, {spec}, threads));
  }
  return out;
}

std::string to_json(const EvalReport& report) {
  nlohmann::json j;
  j["dataset"] = report.dataset;
  j["protocol"] = protocol_name(report.protocol);
  j["n"] = report.protocol.n;
  j["environment"] = report.environment;
  j["classifiers"] = nlohmann::json::array();
  for (const auto& c : report.classifiers) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["recognition_rate"] = c.recognition_rate;
    jc["correct"] = c.correct;
    jc["total"] = c.total;
    jc["timing"] = {{"mean_s", c.timing.mean_s},
                    {"median_s", c.timing.median_s},
                    {"p95_s", c.timing.p95_s}};
    jc["flags"] = c.flags;
    auto confusion = nlohmann::json::array();
    for (const auto& [key, count] : c.confusion)
      confusion.push_back({key.first, key.second, count});
    jc["confusion"] = confusion;
    j["classifiers"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "dataset,protocol,n,classifier,recognition_rate,correct,total,"
         "mean_s,median_s,p95_s,flags\n";
  for (const auto& c : report.classifiers) {
    out << report.dataset << ',' << protocol_name(report.protocol) << ','
        << report.protocol.n << ',' << c.name << ',' << c.recognition_rate
        << ',' << c.correct << ',' << c.total << ',' << c.timing.mean_s << ','
        << c.timing.median_s << ',' << c.timing.p95_s << ',';
    bool first = true;
    for (const auto& [k, v] : c.flags) {
      if (!first) out << ';';
      out << k << '=' << v;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

std::string to_table(const EvalReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset
      << "  protocol: " << protocol_name(report.protocol);
  if (report.protocol.kind == ProtocolKind::first_n)
    out << " (n=" << report.protocol.n << ")";
  out << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %10s %9s %9s %12s\n", "classifier",
                "RR(%)", "correct", "total", "mean_s/query");
  out << line;
  for (const auto& c : report.classifiers) {
    std::snprintf(line, sizeof(line), "%-10s %10.2f %9d %9d %12.6f\n",
                  c.name.c_str(), c.recognition_rate, c.correct, c.total,
                  c.timing.mean_s);
    out << line;
    for (const auto& [k, v] : c.flags)
      out << "    [" << k << " = " << v << "]\n";
  }
  return out.str();
}

std::string environment_note() {
  std::string cpu = "unknown cpu";
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  return cpu + ", " + std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads";
}

}  // namespace pvrc::eval
