#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specrob/specrob.hpp"

namespace fs = std::filesystem;
using namespace specrob;

namespace {

std::string path_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%05zu.tnsr", i);
  return buf;
}

std::string path_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%05zu", i);
  return buf;
}

void require_file(const fs::path& p, const std::string& flag) {
  if (!fs::is_regular_file(p)) throw IoError(flag + ": no such file '" + p.string() + "'");
}

void require_parent(const fs::path& p) {
  const fs::path parent = p.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw IoError("output directory '" + parent.string() + "' does not exist");
  }
}

Matrix to_matrix(const io::TensorData& t, const std::string& what) {
  if (t.shape.size() != 2) throw InvalidInput(what + ": expected a 2-D tensor");
  return Matrix(t.shape[0], t.shape[1], std::vector<double>(t.values.begin(), t.values.end()));
}

std::vector<double> to_vector(const io::TensorData& t, const std::string& what) {
  if (t.shape.size() != 1) throw InvalidInput(what + ": expected a 1-D tensor");
  return {t.values.begin(), t.values.end()};
}

void write_matrix(const fs::path& p, const Matrix& m) {
  const std::vector<float> v(m.data.begin(), m.data.end());
  io::write_tensor(p, v, std::vector<std::size_t>{m.rows, m.cols});
}

void write_vector(const fs::path& p, const std::vector<double>& b) {
  const std::vector<float> v(b.begin(), b.end());
  io::write_tensor(p, v, std::vector<std::size_t>{b.size()});
}

// Linear: a W tensor file, or a directory with W.tnsr and optional b.tnsr.
// MLP: a directory with W1, b1, W2, b2.
std::unique_ptr<Predictor> load_predictor(const std::string& kind, const fs::path& weights, OutputTarget target) {
  if (kind == "linear") {
    fs::path w = weights, b;
    if (fs::is_directory(weights)) {
      w = weights / "W.tnsr";
      if (fs::is_regular_file(weights / "b.tnsr")) b = weights / "b.tnsr";
    }
    require_file(w, "--weights");
    std::vector<double> bias;
    if (!b.empty()) bias = to_vector(io::read_tensor(b), b.string());
    return std::make_unique<LinearPredictor>(to_matrix(io::read_tensor(w), w.string()), bias, target);
  }
  if (kind == "mlp") {
    if (!fs::is_directory(weights)) throw IoError("--weights: mlp weights must be a directory");
    for (const char* f : {"W1.tnsr", "b1.tnsr", "W2.tnsr", "b2.tnsr"}) require_file(weights / f, "--weights");
    MlpWeights w{to_matrix(io::read_tensor(weights / "W1.tnsr"), "W1"),
                 to_vector(io::read_tensor(weights / "b1.tnsr"), "b1"),
                 to_matrix(io::read_tensor(weights / "W2.tnsr"), "W2"),
                 to_vector(io::read_tensor(weights / "b2.tnsr"), "b2")};
    return std::make_unique<MlpPredictor>(std::move(w), target);
  }
  throw InvalidInput("--predictor must be 'linear' or 'mlp'");
}

std::vector<ImageTensor> load_images(const fs::path& p, const std::string& flag) {
  require_file(p, flag);
  return io::read_images(p);
}

std::vector<int> load_labels(const fs::path& p, std::size_t expected, const std::string& flag) {
  require_file(p, flag);
  auto labels = io::read_labels(p);
  if (labels.size() != expected) {
    throw InvalidInput(flag + ": " + std::to_string(labels.size()) + " labels for " + std::to_string(expected) +
                       " images");
  }
  return labels;
}

std::size_t class_count(const std::vector<int>& labels) {
  int hi = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidInput("labels must be non-negative");
    hi = std::max(hi, l);
  }
  return static_cast<std::size_t>(hi) + 1;
}

// ---------------------------------------------------------------- commands

struct GenPathsArgs {
  fs::path images, labels, out;
  std::string mode = "amplitude", relation = "any";
  double cutoff = kDefaultCutoff;
  std::size_t steps = kDefaultSteps, n_paths = 5000;
  std::uint64_t seed = 0;
};

void gen_paths(const GenPathsArgs& a) {
  const auto images = load_images(a.images, "--images");
  const auto labels = load_labels(a.labels, images.size(), "--labels");
  const PathMode mode = parse_path_mode(a.mode);
  const auto specs =
      sample_path_specs(labels, a.n_paths, mode, parse_class_relation(a.relation), a.cutoff, a.steps, a.seed);
  if (fs::exists(a.out) && !fs::is_directory(a.out)) throw IoError("--out: '" + a.out.string() + "' is not a directory");
  fs::create_directories(a.out);

  std::string manifest = "path_id,file,mode,source_index,target_index,source_label,target_label,class_relation,cutoff,steps,seed\n";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const auto path = make_path(s.mode, images[s.source_index], images[s.target_index], s.cutoff, s.steps);
    io::write_images(a.out / path_file_name(i), path.images);
    manifest += path_id(i) + "," + path_file_name(i) + "," + to_string(s.mode) + "," + std::to_string(s.source_index) +
                "," + std::to_string(s.target_index) + "," + std::to_string(labels[s.source_index]) + "," +
                std::to_string(labels[s.target_index]) + "," + to_string(s.class_relation) + "," +
                io::format_double(s.cutoff) + "," + std::to_string(s.steps) + "," + std::to_string(s.seed) + "\n";
  }
  io::write_text(a.out / "manifest.csv", manifest);
  std::cerr << "wrote " << specs.size() << " paths to " << a.out.string() << "\n";
}

struct CorruptArgs {
  fs::path images, out;
  std::string kind;
  double param = 0.0;
  std::uint64_t seed = 0;
};

void corrupt(const CorruptArgs& a) {
  const auto images = load_images(a.images, "--images");
  require_parent(a.out);
  CorruptionSpec spec;
  spec.kind = parse_corruption_kind(a.kind);
  spec.param = a.param;
  if (spec.kind == CorruptionKind::impulse_noise) {
    double lo = images.front().values().front(), hi = lo;
    for (const auto& img : images) {
      for (double v : img.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    spec.impulse_low = lo;
    spec.impulse_high = hi;
  }
  for (const auto& img : images) validate(spec, img.shape());
  std::vector<ImageTensor> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    spec.seed = derive_seed(a.seed, {i});
    out.push_back(apply_corruption(images[i], spec));
  }
  io::write_images(a.out, out);
}

struct PsdShiftArgs {
  std::string mode = "paired";
  fs::path a, b, labels_a, labels_b, out, pgm, bands, radial;
  std::vector<double> edges;
};

ClassGroups group_by_label(std::vector<ImageTensor> images, const std::vector<int>& labels) {
  ClassGroups g;
  for (std::size_t i = 0; i < images.size(); ++i) g[labels[i]].push_back(std::move(images[i]));
  return g;
}

void psd_shift(const PsdShiftArgs& a) {
  auto imgs_a = load_images(a.a, "--a");
  auto imgs_b = load_images(a.b, "--b");
  BandEdges edges = kDefaultBandEdges;
  if (!a.edges.empty()) {
    if (a.edges.size() != 2) throw InvalidInput("--band-edges takes two values r1,r2");
    edges = {a.edges[0], a.edges[1]};
    if (!(edges.low_mid > 0.0 && edges.low_mid < edges.mid_high && edges.mid_high < 1.0)) {
      throw InvalidInput("--band-edges must satisfy 0 < r1 < r2 < 1");
    }
  }
  for (const auto* p : {&a.out, &a.pgm, &a.bands, &a.radial}) {
    if (!p->empty()) require_parent(*p);
  }
  PsdMap map;
  if (a.mode == "paired") {
    map = paired_shift_psd(imgs_a, imgs_b);
  } else if (a.mode == "class-averaged") {
    if (a.labels_a.empty() || a.labels_b.empty()) {
      throw InvalidInput("class-averaged mode needs --labels-a and --labels-b");
    }
    const auto la = load_labels(a.labels_a, imgs_a.size(), "--labels-a");
    const auto lb = load_labels(a.labels_b, imgs_b.size(), "--labels-b");
    map = class_averaged_shift_psd(group_by_label(std::move(imgs_a), la), group_by_label(std::move(imgs_b), lb));
  } else {
    throw InvalidInput("--mode must be 'paired' or 'class-averaged'");
  }
  const BandFractions f = band_fractions(map, edges);

  const std::vector<float> values(map.power.begin(), map.power.end());
  io::write_tensor(a.out, values, std::vector<std::size_t>{map.height, map.width});
  if (!a.pgm.empty()) io::emit_pgm(map, a.pgm);
  if (!a.bands.empty()) {
    const std::string r1 = io::format_double(edges.low_mid), r2 = io::format_double(edges.mid_high);
    io::write_text(a.bands, "band,r_low,r_high,fraction\nlow,0," + r1 + "," + io::format_double(f.low) + "\nmid," + r1 +
                                "," + r2 + "," + io::format_double(f.mid) + "\nhigh," + r2 + ",1," +
                                io::format_double(f.high) + "\n");
  }
  if (!a.radial.empty()) {
    std::string s = "radius,mean_power,bins\n";
    for (const auto& bin : radial_profile(map)) {
      s += io::format_double(bin.center) + "," + io::format_double(bin.mean_power) + "," + std::to_string(bin.bins) + "\n";
    }
    io::write_text(a.radial, s);
  }
  std::cout << "low " << f.low << " mid " << f.mid << " high " << f.high << "\n";
}

struct PathMetricsArgs {
  fs::path traces, out, records;
  std::size_t threshold = kDefaultHffThreshold;
  std::string model_id, prefix;
  bool append = false;
};

std::string summary_row(const std::string& name, const MetricSummary& s) {
  return "#summary," + name + "," + io::format_double(s.mean) + "," + io::format_double(s.sample_std) + "," +
         std::to_string(s.n) + "," + io::format_double(s.ci95_low) + "," + io::format_double(s.ci95_high) + "\n";
}

void path_metrics_cmd(const PathMetricsArgs& a) {
  require_file(a.traces, "--traces");
  const auto traces = io::read_traces(a.traces);
  require(!traces.empty(), "--traces: no traces");
  for (const auto& t : traces) {
    require(a.threshold >= 1 && a.threshold < t.steps() / 2 + 1,
            "--hff-threshold must be in [1, T/2] for trace '" + t.path_id() + "'");
  }
  require_parent(a.out);
  std::vector<MetricRecord> existing;
  if (!a.records.empty()) {
    if (a.model_id.empty()) throw InvalidInput("--records needs --model-id");
    require_parent(a.records);
    if (a.append && fs::exists(a.records)) existing = io::read_metrics(a.records);
  }

  std::vector<double> hffs, cds;
  std::string s = "# hff_threshold=" + std::to_string(a.threshold) + "\npath_id,hff,cd\n";
  for (const auto& t : traces) {
    const auto m = path_metrics(t, a.threshold);
    hffs.push_back(m.hff);
    cds.push_back(static_cast<double>(m.cd));
    s += t.path_id() + "," + io::format_double(m.hff) + "," + std::to_string(m.cd) + "\n";
  }
  const auto sh = summarize_gaussian(hffs), sc = summarize_gaussian(cds);
  s += "#summary,metric,mean,sample_std,n,ci95_low,ci95_high\n" + summary_row("hff", sh) + summary_row("cd", sc);
  io::write_text(a.out, s);

  if (!a.records.empty()) {
    existing.push_back({a.model_id, a.prefix + "HFF", sh.mean, ValueKind::raw});
    existing.push_back({a.model_id, a.prefix + "CD", sc.mean, ValueKind::raw});
    io::write_text(a.records, io::format_metrics(existing));
  }
  std::cout << "hff " << sh.mean << " cd " << sc.mean << " over " << traces.size() << " paths\n";
}

struct JacobianArgs {
  std::string predictor = "linear", target = "probs", model_id;
  fs::path weights, images, out;
  std::size_t nproj = kDefaultProjections, batch = kDefaultJacobianBatch;
  std::uint64_t seed = 0;
};

void jacobian_cmd(const JacobianArgs& a) {
  const auto pred = load_predictor(a.predictor, a.weights, parse_output_target(a.target));
  auto images = load_images(a.images, "--images");
  if (images.size() < a.batch) {
    throw InvalidInput("--batch " + std::to_string(a.batch) + " exceeds the " + std::to_string(images.size()) +
                       " images available");
  }
  images.resize(a.batch);
  require_parent(a.out);
  const auto est = estimate_jacobian_norm(*pred, images, {a.nproj, a.batch, a.seed});
  io::write_text(a.out, "model_id,target,frobenius_norm,ci95_low,ci95_high,n_estimates,method\n" + a.model_id + "," +
                            a.target + "," + io::format_double(est.frobenius_norm) + "," +
                            io::format_double(est.ci95_low) + "," + io::format_double(est.ci95_high) + "," +
                            std::to_string(est.n_estimates) + "," +
                            (est.method == JacobianMethod::analytic_vjp ? "vjp" : "finite-difference") + "\n");
  std::cout << "frobenius norm " << est.frobenius_norm << " [" << est.ci95_low << ", " << est.ci95_high << "]\n";
}

struct RegressArgs {
  fs::path accuracies, metrics, out, svg;
  std::string x = kIdAccuracy, ood, id = "id", group_by = "group", transform = "auto";
};

void regress(const RegressArgs& a) {
  require_file(a.accuracies, "--accuracies");
  const auto acc = io::read_accuracies(a.accuracies);
  std::vector<MetricRecord> metrics;
  if (!a.metrics.empty()) {
    require_file(a.metrics, "--metrics");
    metrics = io::read_metrics(a.metrics);
  }
  if (a.ood.empty()) throw InvalidInput("--ood is required");
  RegressionQuery q;
  q.x_spec = a.x;
  q.id_dataset = a.id;
  q.ood_dataset = a.ood;
  q.group_by = a.group_by;
  if (a.transform == "auto") q.x_transform = XTransform::by_kind;
  else if (a.transform == "probit") q.x_transform = XTransform::probit;
  else if (a.transform == "raw") q.x_transform = XTransform::raw;
  else throw InvalidInput("--x-transform must be auto, probit or raw");
  require_parent(a.out);
  if (!a.svg.empty()) require_parent(a.svg);

  const auto fit = grouped_regression(acc, metrics, q);
  for (const auto& s : fit.skipped) std::cerr << "warning: skipped group '" << s.group << "': " << s.reason << "\n";

  std::string s = "# x=" + a.x + " ood=" + a.ood + " x_probit=" + (fit.x_probit ? "1" : "0") + "\n";
  s += "group,slope,intercept,r2,n_models\n";
  for (const auto& g : fit.per_group) {
    s += g.group + "," + io::format_double(g.fit.slope) + "," + io::format_double(g.fit.intercept) + "," +
         io::format_double(g.fit.r2) + "," + std::to_string(g.n_models) + "\n";
  }
  s += "#averaged," + io::format_double(fit.averaged_m) + "," + io::format_double(fit.averaged_r2) + "\n";
  for (const auto& sk : fit.skipped) s += "#skipped," + sk.group + "," + sk.reason + "\n";
  io::write_text(a.out, s);

  if (!a.svg.empty()) {
    std::vector<io::ScatterPoint> pts;
    for (const auto& p : fit.points) pts.push_back({p.x, p.y, p.group, p.y_low, p.y_high});
    std::vector<io::ScatterLine> lines;
    for (const auto& g : fit.per_group) lines.push_back({g.group, g.fit.slope, g.fit.intercept, g.fit.r2});
    io::AxisLabels labels;
    labels.x = (fit.x_probit ? "probit(" + a.x + ")" : a.x);
    labels.y = "probit(" + a.ood + " accuracy)";
    io::emit_scatter_svg(pts, lines, labels, a.svg);
  }
  std::cout << "averaged slope " << fit.averaged_m << " averaged r2 " << fit.averaged_r2 << " over "
            << fit.per_group.size() << " groups\n";
}

struct ReportArgs {
  std::vector<fs::path> metrics;
  fs::path fit, out;
};

void report(const ReportArgs& a) {
  for (const auto& m : a.metrics) require_file(m, "--metrics");
  if (!a.fit.empty()) require_file(a.fit, "--fit");
  require_parent(a.out);
  std::string s = "# Robustness report\n\n";
  if (!a.metrics.empty()) {
    s += "| file | paths | HFF mean | HFF 95% CI | CD mean | CD 95% CI |\n|---|---|---|---|---|---|\n";
    for (const auto& m : a.metrics) {
      const auto t = io::read_csv(m);
      io::require_header(t, {"path_id", "hff", "cd"}, m.string());
      std::vector<double> h, c;
      for (const auto& row : t.rows) {
        const std::string where = m.string() + ":" + std::to_string(row.line);
        h.push_back(io::parse_number(row.fields[1], where));
        c.push_back(io::parse_number(row.fields[2], where));
      }
      if (h.empty()) throw ParseError(m.string() + ": no rows");
      const auto sh = summarize_gaussian(h), sc = summarize_gaussian(c);
      s += "| " + m.filename().string() + " | " + std::to_string(sh.n) + " | " + io::format_double(sh.mean) + " | [" +
           io::format_double(sh.ci95_low) + ", " + io::format_double(sh.ci95_high) + "] | " +
           io::format_double(sc.mean) + " | [" + io::format_double(sc.ci95_low) + ", " +
           io::format_double(sc.ci95_high) + "] |\n";
    }
    s += "\n";
  }
  if (!a.fit.empty()) {
    const auto t = io::read_csv(a.fit);
    io::require_header(t, {"group", "slope", "intercept", "r2", "n_models"}, a.fit.string());
    s += "| group | slope | intercept | R^2 | models |\n|---|---|---|---|---|\n";
    for (const auto& row : t.rows) {
      s += "| " + row.fields[0] + " | " + row.fields[1] + " | " + row.fields[2] + " | " + row.fields[3] + " | " +
           row.fields[4] + " |\n";
    }
    const std::string text = io::read_text(a.fit);
    const auto pos = text.find("#averaged,");
    if (pos != std::string::npos) {
      const auto f = io::split_fields(text.substr(pos, text.find('\n', pos) - pos));
      if (f.size() == 3) s += "\nAveraged slope " + f[1] + ", averaged R^2 " + f[2] + ".\n";
    }
  }
  io::write_text(a.out, s);
}

struct SynthArgs {
  std::size_t per_class = 100, channels = 1, height = 16, width = 16;
  double noise = 0.3;
  std::uint64_t seed = 0;
  fs::path out_images, out_labels;
};

void synth_blobs(const SynthArgs& a) {
  require(a.per_class >= 1 && a.channels >= 1 && a.height >= 2 && a.width >= 2, "invalid blob dataset size");
  require(a.noise >= 0.0, "--noise must be >= 0");
  require_parent(a.out_images);
  require_parent(a.out_labels);
  const auto d = blob_dataset(a.per_class, {a.channels, a.height, a.width}, a.noise, a.seed);
  io::write_images(a.out_images, d.images);
  io::write_text(a.out_labels, io::format_labels(d.labels));
}

struct TrainArgs {
  fs::path images, labels, out;
  MlpTrainingConfig cfg;
};

void train_mlp_cmd(const TrainArgs& a) {
  const auto images = load_images(a.images, "--images");
  const auto labels = load_labels(a.labels, images.size(), "--labels");
  const std::size_t classes = class_count(labels);
  require(classes >= 2, "training needs at least 2 classes");
  if (fs::exists(a.out) && !fs::is_directory(a.out)) throw IoError("--out: not a directory");
  const auto mlp = train_mlp(images, labels, classes, a.cfg);
  fs::create_directories(a.out);
  const auto& w = mlp.weights();
  write_matrix(a.out / "W1.tnsr", w.hidden_weights);
  write_vector(a.out / "b1.tnsr", w.hidden_bias);
  write_matrix(a.out / "W2.tnsr", w.output_weights);
  write_vector(a.out / "b2.tnsr", w.output_bias);
}

struct EvalArgs {
  std::string predictor = "mlp", model_id, group, dataset;
  fs::path weights, images, labels, out;
  bool append = false;
};

void evaluate(const EvalArgs& a) {
  if (a.model_id.empty() || a.group.empty() || a.dataset.empty()) {
    throw InvalidInput("--model-id, --group and --dataset are required");
  }
  const auto pred = load_predictor(a.predictor, a.weights, OutputTarget::logits);
  const auto images = load_images(a.images, "--images");
  const auto labels = load_labels(a.labels, images.size(), "--labels");
  require_parent(a.out);
  std::vector<AccuracyRecord> records;
  if (a.append && fs::exists(a.out)) records = io::read_accuracies(a.out);
  const Matrix out = pred->predict(images);
  long correct = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    correct += static_cast<int>(argmax(out.row(i))) == labels[i];
  }
  records.push_back({a.model_id, a.group, a.dataset, correct, static_cast<long>(images.size())});
  io::write_text(a.out, io::format_accuracies(records));
  std::cout << a.model_id << " " << a.dataset << " " << correct << "/" << images.size() << "\n";
}

struct PredictPathsArgs {
  std::string predictor = "mlp";
  fs::path weights, paths, out;
};

void predict_paths(const PredictPathsArgs& a) {
  const auto pred = load_predictor(a.predictor, a.weights, OutputTarget::probs);
  const fs::path manifest = a.paths / "manifest.csv";
  require_file(manifest, "--paths");
  const auto t = io::read_csv(manifest);
  if (t.header.size() < 2 || t.header[0] != "path_id" || t.header[1] != "file") {
    throw ParseError(manifest.string() + ": header must start with 'path_id,file'");
  }
  for (const auto& row : t.rows) require_file(a.paths / row.fields[1], manifest.string() + ":" + std::to_string(row.line));
  require_parent(a.out);
  std::vector<PredictionTrace> traces;
  for (const auto& row : t.rows) {
    const auto images = io::read_images(a.paths / row.fields[1]);
    const Matrix p = pred->predict(images);
    traces.emplace_back(row.fields[0], p.rows, p.cols, p.data);
  }
  io::write_text(a.out, io::format_traces(traces));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral robustness toolkit"};
  app.require_subcommand(1);

  GenPathsArgs gp;
  auto* c_gp = app.add_subcommand("gen-paths", "Sample interpolation paths between labeled images");
  c_gp->add_option("--images", gp.images)->required();
  c_gp->add_option("--labels", gp.labels)->required();
  c_gp->add_option("--mode", gp.mode)->check(CLI::IsMember({"amplitude", "phase", "pixel"}));
  c_gp->add_option("--class-relation", gp.relation)->check(CLI::IsMember({"within", "between", "any"}));
  c_gp->add_option("--cutoff", gp.cutoff)->check(CLI::Range(0.0, 1.0));
  c_gp->add_option("--steps", gp.steps)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  c_gp->add_option("--n-paths", gp.n_paths)->check(CLI::PositiveNumber);
  c_gp->add_option("--seed", gp.seed);
  c_gp->add_option("--out", gp.out)->required();

  CorruptArgs co;
  auto* c_co = app.add_subcommand("corrupt", "Apply a corruption to every image");
  c_co->add_option("--images", co.images)->required();
  c_co->add_option("--kind", co.kind)->required();
  c_co->add_option("--param", co.param)->required();
  c_co->add_option("--seed", co.seed);
  c_co->add_option("--out", co.out)->required();

  PsdShiftArgs ps;
  auto* c_ps = app.add_subcommand("psd-shift", "Power spectral density of a dataset shift");
  c_ps->add_option("--mode", ps.mode)->check(CLI::IsMember({"paired", "class-averaged"}));
  c_ps->add_option("--a", ps.a)->required();
  c_ps->add_option("--b", ps.b)->required();
  c_ps->add_option("--labels-a", ps.labels_a);
  c_ps->add_option("--labels-b", ps.labels_b);
  c_ps->add_option("--out", ps.out)->required();
  c_ps->add_option("--pgm", ps.pgm);
  c_ps->add_option("--bands", ps.bands);
  c_ps->add_option("--radial", ps.radial);
  c_ps->add_option("--band-edges", ps.edges)->delimiter(',');

  PathMetricsArgs pm;
  auto* c_pm = app.add_subcommand("path-metrics", "HFF and consistent distance per trace");
  c_pm->add_option("--traces", pm.traces)->required();
  c_pm->add_option("--hff-threshold", pm.threshold)->check(CLI::PositiveNumber);
  c_pm->add_option("--out", pm.out)->required();
  c_pm->add_option("--model-id", pm.model_id);
  c_pm->add_option("--records", pm.records, "Also write mean HFF/CD as metric records");
  c_pm->add_option("--metric-prefix", pm.prefix);
  c_pm->add_flag("--append", pm.append);

  JacobianArgs ja;
  auto* c_ja = app.add_subcommand("jacobian", "Random-projection Jacobian Frobenius norm");
  c_ja->add_option("--predictor", ja.predictor)->check(CLI::IsMember({"linear", "mlp"}));
  c_ja->add_option("--weights", ja.weights)->required();
  c_ja->add_option("--images", ja.images)->required();
  c_ja->add_option("--nproj", ja.nproj)->check(CLI::PositiveNumber);
  c_ja->add_option("--batch", ja.batch)->check(CLI::PositiveNumber);
  c_ja->add_option("--target", ja.target)->check(CLI::IsMember({"probs", "logits"}));
  c_ja->add_option("--seed", ja.seed);
  c_ja->add_option("--model-id", ja.model_id);
  c_ja->add_option("--out", ja.out)->required();

  RegressArgs rg;
  auto* c_rg = app.add_subcommand("regress", "Grouped probit regression of OOD accuracy");
  c_rg->add_option("--accuracies", rg.accuracies)->required();
  c_rg->add_option("--metrics", rg.metrics);
  c_rg->add_option("--x", rg.x);
  c_rg->add_option("--ood", rg.ood)->required();
  c_rg->add_option("--id-dataset", rg.id);
  c_rg->add_option("--group-by", rg.group_by)->check(CLI::IsMember({"group", "all"}));
  c_rg->add_option("--x-transform", rg.transform)->check(CLI::IsMember({"auto", "probit", "raw"}));
  c_rg->add_option("--out", rg.out)->required();
  c_rg->add_option("--svg", rg.svg);

  ReportArgs rp;
  auto* c_rp = app.add_subcommand("report", "Markdown summary of metrics and fits");
  c_rp->add_option("--metrics", rp.metrics);
  c_rp->add_option("--fit", rp.fit);
  c_rp->add_option("--out", rp.out)->required();

  SynthArgs sy;
  auto* c_sy = app.add_subcommand("synth-blobs", "Two-class synthetic blob dataset");
  c_sy->add_option("--per-class", sy.per_class);
  c_sy->add_option("--channels", sy.channels);
  c_sy->add_option("--height", sy.height);
  c_sy->add_option("--width", sy.width);
  c_sy->add_option("--noise", sy.noise);
  c_sy->add_option("--seed", sy.seed);
  c_sy->add_option("--out-images", sy.out_images)->required();
  c_sy->add_option("--out-labels", sy.out_labels)->required();

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train-mlp", "Train a one-hidden-layer classifier");
  c_tr->add_option("--images", tr.images)->required();
  c_tr->add_option("--labels", tr.labels)->required();
  c_tr->add_option("--hidden", tr.cfg.hidden_units)->check(CLI::PositiveNumber);
  c_tr->add_option("--iterations", tr.cfg.iterations);
  c_tr->add_option("--lr", tr.cfg.learning_rate)->check(CLI::PositiveNumber);
  c_tr->add_option("--seed", tr.cfg.seed);
  c_tr->add_option("--out", tr.out)->required();

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Count correct top-1 predictions");
  c_ev->add_option("--predictor", ev.predictor)->check(CLI::IsMember({"linear", "mlp"}));
  c_ev->add_option("--weights", ev.weights)->required();
  c_ev->add_option("--images", ev.images)->required();
  c_ev->add_option("--labels", ev.labels)->required();
  c_ev->add_option("--model-id", ev.model_id)->required();
  c_ev->add_option("--group", ev.group)->required();
  c_ev->add_option("--dataset", ev.dataset)->required();
  c_ev->add_option("--out", ev.out)->required();
  c_ev->add_flag("--append", ev.append);

  PredictPathsArgs pp;
  auto* c_pp = app.add_subcommand("predict-paths", "Predicted probabilities along generated paths");
  c_pp->add_option("--predictor", pp.predictor)->check(CLI::IsMember({"linear", "mlp"}));
  c_pp->add_option("--weights", pp.weights)->required();
  c_pp->add_option("--paths", pp.paths)->required();
  c_pp->add_option("--out", pp.out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_gp) gen_paths(gp);
    else if (*c_co) corrupt(co);
    else if (*c_ps) psd_shift(ps);
    else if (*c_pm) path_metrics_cmd(pm);
    else if (*c_ja) jacobian_cmd(ja);
    else if (*c_rg) regress(rg);
    else if (*c_rp) report(rp);
    else if (*c_sy) synth_blobs(sy);
    else if (*c_tr) train_mlp_cmd(tr);
    else if (*c_ev) evaluate(ev);
    else if (*c_pp) predict_paths(pp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
