#include "aeromix/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

namespace {

constexpr const char* kMagic = "aeromix-model v1";

void write_trees(std::ostream& out, const std::vector<RegressionTree>& trees) {
  out << "TREES " << trees.size() << "\n";
  for (std::size_t t = 0; t < trees.size(); ++t) {
    out << "TREE " << t << " " << trees[t].nodes.size() << "\n";
    for (const TreeNode& node : trees[t].nodes) {
      if (node.is_leaf()) {
        out << "L " << format_double(node.value) << "\n";
      } else {
        out << "S " << node.feature << " " << format_double(node.threshold) << " "
            << node.left << " " << node.right << "\n";
      }
    }
  }
}

struct Reader {
  std::ifstream in;
  std::string path;
  std::size_t line_no = 0;

  std::string next() {
    std::string line;
    if (!std::getline(in, line)) {
      fail(ErrorClass::ParseError, path + ": unexpected end of model file");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail_here(const std::string& msg) {
    fail(ErrorClass::ParseError, path + ":" + std::to_string(line_no) + ": " + msg);
  }
};

// Parses the tree blocks that follow an already-consumed "TREES <count>"
// line.
std::vector<RegressionTree> read_trees(Reader& reader, const std::string& trees_line,
                                       std::size_t n_features) {
  std::istringstream head(trees_line);
  std::string tag;
  std::size_t n_trees = 0;
  if (!(head >> tag >> n_trees) || tag != "TREES") {
    reader.fail_here("expected 'TREES <count>'");
  }
  std::vector<RegressionTree> trees(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    std::istringstream th(reader.next());
    std::size_t index = 0, n_nodes = 0;
    if (!(th >> tag >> index >> n_nodes) || tag != "TREE" || index != t) {
      reader.fail_here("expected 'TREE " + std::to_string(t) + " <nodes>'");
    }
    trees[t].nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      std::istringstream ns(reader.next());
      std::string kind;
      ns >> kind;
      TreeNode& node = trees[t].nodes[i];
      if (kind == "L") {
        std::string value;
        if (!(ns >> value)) reader.fail_here("bad leaf line");
        node.value = parse_double(value, "leaf value");
      } else if (kind == "S") {
        std::string threshold;
        if (!(ns >> node.feature >> threshold >> node.left >> node.right)) {
          reader.fail_here("bad split line");
        }
        node.threshold = parse_double(threshold, "split threshold");
        if (node.feature < 0 || node.feature >= static_cast<int>(n_features) ||
            node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
            node.left >= static_cast<int>(n_nodes) ||
            node.right >= static_cast<int>(n_nodes)) {
          reader.fail_here("split node references are not preorder-consistent");
        }
      } else {
        reader.fail_here("unknown node kind '" + kind + "'");
      }
    }
  }
  return trees;
}

std::map<std::string, std::string> read_header(Reader& reader, std::string& stop_line) {
  std::map<std::string, std::string> header;
  for (;;) {
    std::string line = reader.next();
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("TREES", 0) == 0 || t == "END") {
      stop_line = t;
      return header;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) reader.fail_here("expected 'key = value'");
    header[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
}

std::string need(const std::map<std::string, std::string>& header, const char* key,
                 const std::string& path) {
  const auto it = header.find(key);
  if (it == header.end()) {
    fail(ErrorClass::ParseError, path + ": missing model field '" + std::string(key) + "'");
  }
  return it->second;
}

}  // namespace

double ModelBundle::predict(std::span<const double> features) const {
  switch (kind) {
    case ModelKind::Gbt: return gbt.predict(features);
    case ModelKind::Rf: return rf.predict(features);
    case ModelKind::Linear: return aeromix::predict(linear, features);
  }
  fail(ErrorClass::Internal, "bad model kind");
}

void save_model(const GBTModel& model, const std::string& path) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "kind = gbt\n";
  out << "features = " << join(model.feature_names, ",") << "\n";
  out << "n_trees = " << model.params.n_trees << "\n";
  out << "max_depth = " << model.params.max_depth << "\n";
  out << "learning_rate = " << format_double(model.params.learning_rate) << "\n";
  out << "subsample = " << format_double(model.params.subsample) << "\n";
  out << "min_samples_leaf = " << model.params.min_samples_leaf << "\n";
  out << "seed = " << model.params.seed << "\n";
  out << "base_score = " << format_double(model.base_score) << "\n";
  write_trees(out, model.trees);
  out << "END\n";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorClass::IoError, "cannot write model file " + path);
  f << out.str();
}

void save_model(const RFModel& model, const std::string& path) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "kind = rf\n";
  out << "features = " << join(model.feature_names, ",") << "\n";
  out << "n_trees = " << model.params.n_trees << "\n";
  out << "max_depth = " << model.params.max_depth << "\n";
  out << "min_samples_leaf = " << model.params.min_samples_leaf << "\n";
  out << "bootstrap = " << (model.params.bootstrap ? 1 : 0) << "\n";
  out << "max_features = " << model.params.max_features << "\n";
  out << "seed = " << model.params.seed << "\n";
  write_trees(out, model.trees);
  out << "END\n";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorClass::IoError, "cannot write model file " + path);
  f << out.str();
}

void save_model(const LinearModel& model, const std::vector<std::string>& feature_names,
                const std::string& path) {
  if (feature_names.size() != model.coefficients.size()) {
    fail(ErrorClass::ValidationError, "linear model: feature name count mismatch");
  }
  std::ostringstream out;
  out << kMagic << "\n";
  out << "kind = linear\n";
  out << "features = " << join(feature_names, ",") << "\n";
  out << "bias = " << format_double(model.bias) << "\n";
  std::vector<std::string> coefs;
  coefs.reserve(model.coefficients.size());
  for (double c : model.coefficients) coefs.push_back(format_double(c));
  out << "coefficients = " << join(coefs, ",") << "\n";
  out << "END\n";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorClass::IoError, "cannot write model file " + path);
  f << out.str();
}

ModelBundle load_model(const std::string& path) {
  Reader reader;
  reader.in.open(path);
  reader.path = path;
  if (!reader.in) {
    fail(ErrorClass::InputMissing, "cannot open model file " + path);
  }
  if (trim(reader.next()) != kMagic) {
    reader.fail_here(std::string("expected magic line '") + kMagic + "'");
  }

  std::string stop_line;
  const auto header = read_header(reader, stop_line);
  const std::string kind = need(header, "kind", path);

  ModelBundle bundle;
  bundle.feature_names = split(need(header, "features", path), ',');

  if (kind == "linear") {
    bundle.kind = ModelKind::Linear;
    bundle.linear.bias = parse_double(need(header, "bias", path), "bias");
    for (const auto& c : split(need(header, "coefficients", path), ',')) {
      bundle.linear.coefficients.push_back(parse_double(c, "coefficient"));
    }
    if (bundle.linear.coefficients.size() != bundle.feature_names.size()) {
      fail(ErrorClass::ParseError, path + ": coefficient/feature count mismatch");
    }
    return bundle;
  }

  if (stop_line.rfind("TREES", 0) != 0) {
    reader.fail_here("expected TREES block");
  }
  std::vector<RegressionTree> trees =
      read_trees(reader, stop_line, bundle.feature_names.size());

  if (kind == "gbt") {
    bundle.kind = ModelKind::Gbt;
    GBTModel& m = bundle.gbt;
    m.feature_names = bundle.feature_names;
    m.params.n_trees = static_cast<int>(parse_long(need(header, "n_trees", path), "n_trees"));
    m.params.max_depth =
        static_cast<int>(parse_long(need(header, "max_depth", path), "max_depth"));
    m.params.learning_rate =
        parse_double(need(header, "learning_rate", path), "learning_rate");
    m.params.subsample = parse_double(need(header, "subsample", path), "subsample");
    m.params.min_samples_leaf = static_cast<int>(
        parse_long(need(header, "min_samples_leaf", path), "min_samples_leaf"));
    m.params.seed =
        static_cast<std::uint64_t>(parse_long(need(header, "seed", path), "seed"));
    m.base_score = parse_double(need(header, "base_score", path), "base_score");
    m.trees = std::move(trees);
    return bundle;
  }
  if (kind == "rf") {
    bundle.kind = ModelKind::Rf;
    RFModel& m = bundle.rf;
    m.feature_names = bundle.feature_names;
    m.params.n_trees = static_cast<int>(parse_long(need(header, "n_trees", path), "n_trees"));
    m.params.max_depth =
        static_cast<int>(parse_long(need(header, "max_depth", path), "max_depth"));
    m.params.min_samples_leaf = static_cast<int>(
        parse_long(need(header, "min_samples_leaf", path), "min_samples_leaf"));
    m.params.bootstrap = parse_long(need(header, "bootstrap", path), "bootstrap") != 0;
    m.params.max_features =
        static_cast<int>(parse_long(need(header, "max_features", path), "max_features"));
    m.params.seed =
        static_cast<std::uint64_t>(parse_long(need(header, "seed", path), "seed"));
    m.trees = std::move(trees);
    return bundle;
  }
  fail(ErrorClass::ParseError, path + ": unknown model kind '" + kind + "'");
}

}  // namespace aeromix
