#include "memsvm/serialize.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace memsvm {

namespace {

void expect(std::istream& f, const std::string& key, const std::string& path) {
  std::string tok;
  if (!(f >> tok) || tok != key)
    throw DataError("artifact: expected '" + key + "' in " + path);
}

template <typename T>
T read_value(std::istream& f, const std::string& key, const std::string& path) {
  expect(f, key, path);
  T v{};
  if (!(f >> v)) throw DataError("artifact: bad value for '" + key + "' in " + path);
  return v;
}

void check_version(std::istream& f, const std::string& magic, int version,
                   const std::string& path) {
  int got = read_value<int>(f, magic, path);
  if (got != version) {
    std::ostringstream msg;
    msg << "artifact: " << path << " has " << magic << " format " << got << ", expected "
        << version;
    throw DataError(msg.str());
  }
}

void write_matrix(std::ostream& f, const MatrixXd& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) f << (j ? " " : "") << m(i, j);
    f << "\n";
  }
}

MatrixXd read_matrix(std::istream& f, Index rows, Index cols, const std::string& key,
                     const std::string& path) {
  expect(f, key, path);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (!(f >> m(i, j)))
        throw DataError("artifact: truncated '" + key + "' block in " + path);
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("artifact: cannot write " + path);
  f << std::setprecision(17);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("artifact: cannot open " + path);
  return f;
}

}  // namespace

void save_crossbar(const CrossbarArray<double>& xbar, const std::string& path) {
  auto f = open_out(path);
  const auto& p = xbar.params();
  f << "memsvm-crossbar " << crossbar_format_version << "\n";
  f << "rows " << xbar.rows() << "\n";
  f << "cols " << xbar.cols() << "\n";
  f << "num_states " << p.num_states << "\n";
  f << "g_min " << p.g_min << "\n";
  f << "g_max " << p.g_max << "\n";
  f << "ladder_shape " << name_of(p.ladder_shape) << "\n";
  f << "e_potentiation " << p.e_potentiation << "\n";
  f << "e_depression " << p.e_depression << "\n";
  f << "sigma_program " << p.sigma_program << "\n";
  f << "sigma_read " << p.sigma_read << "\n";
  f << "pulses_potentiation " << xbar.pulse_log().n_potentiation << "\n";
  f << "pulses_depression " << xbar.pulse_log().n_depression << "\n";
  f << "ladder";
  for (Index k = 0; k < xbar.ladder().size(); ++k) f << " " << xbar.ladder()(k);
  f << "\n";
  f << "states\n";
  for (Index i = 0; i < xbar.rows(); ++i) {
    for (Index j = 0; j < xbar.cols(); ++j) f << (j ? " " : "") << xbar.state_indices()(i, j);
    f << "\n";
  }
  f << "offsets\n";
  write_matrix(f, xbar.offsets());
  f << "end\n";
  if (!f) throw DataError("artifact: write failed for " + path);
}

CrossbarArray<double> load_crossbar(const std::string& path) {
  auto f = open_in(path);
  check_version(f, "memsvm-crossbar", crossbar_format_version, path);

  const Index rows = read_value<Index>(f, "rows", path);
  const Index cols = read_value<Index>(f, "cols", path);
  DeviceParams<double> p;
  p.num_states = read_value<int>(f, "num_states", path);
  p.g_min = read_value<double>(f, "g_min", path);
  p.g_max = read_value<double>(f, "g_max", path);
  p.ladder_shape = ladder_shape_from_name(read_value<std::string>(f, "ladder_shape", path));
  p.e_potentiation = read_value<double>(f, "e_potentiation", path);
  p.e_depression = read_value<double>(f, "e_depression", path);
  p.sigma_program = read_value<double>(f, "sigma_program", path);
  p.sigma_read = read_value<double>(f, "sigma_read", path);
  PulseLog log;
  log.n_potentiation = read_value<std::int64_t>(f, "pulses_potentiation", path);
  log.n_depression = read_value<std::int64_t>(f, "pulses_depression", path);

  if (rows < 1 || cols < 1 || p.num_states < 2)
    throw DataError("artifact: implausible crossbar dimensions in " + path);

  expect(f, "ladder", path);
  VectorXd ladder(p.num_states);
  for (Index k = 0; k < ladder.size(); ++k)
    if (!(f >> ladder(k))) throw DataError("artifact: truncated 'ladder' block in " + path);

  MatrixXd states_real = read_matrix(f, rows, cols, "states", path);
  MatrixXd offsets = read_matrix(f, rows, cols, "offsets", path);
  expect(f, "end", path);

  MatrixXi states = states_real.cast<int>();
  if (((states.cast<double>() - states_real).cwiseAbs().maxCoeff()) != 0.0)
    throw DataError("artifact: non-integer state index in " + path);
  return CrossbarArray<double>(p, ladder, states, offsets, log);
}

void save_model(const ModelArtifact& art, const std::string& path) {
  art.model.validate();
  if (Index(art.label_names.size()) != art.model.num_classes())
    throw ConfigError("artifact: " + std::to_string(art.label_names.size()) + " labels for " +
                      std::to_string(art.model.num_classes()) + " classes");
  const Index d = art.model.templates.rows();
  if (art.norm.min.size() != 0 && art.norm.min.size() != d)
    throw ConfigError("artifact: normalization width does not match the feature count");

  auto f = open_out(path);
  f << "memsvm-model " << model_format_version << "\n";
  f << "features " << d << "\n";
  f << "templates " << art.model.templates.cols() << "\n";
  f << "rows " << art.model.weights.rows() << "\n";
  f << "noise_enabled " << (art.model.readout.noise_enabled ? 1 : 0) << "\n";
  f << "absolute_value " << (art.model.readout.absolute_value ? 1 : 0) << "\n";
  f << "labels " << art.label_names.size() << "\n";
  for (const auto& name : art.label_names) f << name << "\n";
  f << "normalization " << art.norm.min.size() << "\n";
  for (Index i = 0; i < art.norm.min.size(); ++i)
    f << art.norm.min(i) << " " << art.norm.max(i) << "\n";
  f << "templates_matrix\n";
  write_matrix(f, art.model.templates);
  f << "weights\n";
  write_matrix(f, art.model.weights);
  f << "biases\n";
  for (Index r = 0; r < art.model.biases.size(); ++r) f << art.model.biases(r) << "\n";
  f << "end\n";
  if (!f) throw DataError("artifact: write failed for " + path);
}

ModelArtifact load_model(const std::string& path) {
  auto f = open_in(path);
  check_version(f, "memsvm-model", model_format_version, path);

  const Index d = read_value<Index>(f, "features", path);
  const Index np = read_value<Index>(f, "templates", path);
  const Index rows = read_value<Index>(f, "rows", path);
  ModelArtifact art;
  art.model.readout.noise_enabled = read_value<int>(f, "noise_enabled", path) != 0;
  art.model.readout.absolute_value = read_value<int>(f, "absolute_value", path) != 0;

  const Index labels = read_value<Index>(f, "labels", path);
  if (labels < 2 || labels > 100000)
    throw DataError("artifact: implausible label count in " + path);
  {
    std::string rest;
    std::getline(f, rest);  // finish the count line
  }
  for (Index i = 0; i < labels; ++i) {
    std::string name;
    if (!std::getline(f, name)) throw DataError("artifact: truncated label list in " + path);
    if (!name.empty() && name.back() == '\r') name.pop_back();
    art.label_names.push_back(name);
  }

  const Index norm_count = read_value<Index>(f, "normalization", path);
  if (norm_count != 0) {
    if (norm_count != d)
      throw DataError("artifact: normalization width does not match features in " + path);
    art.norm.min.resize(norm_count);
    art.norm.max.resize(norm_count);
    for (Index i = 0; i < norm_count; ++i)
      if (!(f >> art.norm.min(i) >> art.norm.max(i)))
        throw DataError("artifact: truncated 'normalization' block in " + path);
  }

  art.model.templates = read_matrix(f, d, np, "templates_matrix", path);
  art.model.weights = read_matrix(f, rows, np, "weights", path);
  expect(f, "biases", path);
  art.model.biases.resize(rows);
  for (Index r = 0; r < rows; ++r)
    if (!(f >> art.model.biases(r)))
      throw DataError("artifact: truncated 'biases' block in " + path);
  expect(f, "end", path);

  art.model.validate();
  if (Index(art.label_names.size()) != art.model.num_classes())
    throw DataError("artifact: label count does not match the class count in " + path);
  return art;
}

}  // namespace memsvm
