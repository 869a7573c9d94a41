#include "structsvm/model.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "structsvm/error.hpp"

namespace structsvm {

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Chain: return "chain";
    case ModelKind::MultiLabel: return "multilabel";
    case ModelKind::Hierarchical: return "hierarchical";
  }
  return "unknown";
}

std::size_t StructuredModel::dimension(ModelKind kind, int num_outputs, int feature_dim) {
  const auto S = static_cast<std::size_t>(num_outputs), D = static_cast<std::size_t>(feature_dim);
  return kind == ModelKind::Chain ? S * D + S * S : S * D;
}

StructuredModel StructuredModel::zeros(ModelKind kind, int num_outputs, int feature_dim) {
  if (num_outputs <= 0 || feature_dim <= 0) throw Error(ErrorCode::InvalidParams, "model dimensions must be positive");
  return {kind, num_outputs, feature_dim, std::vector<double>(dimension(kind, num_outputs, feature_dim), 0.0)};
}

void save_model(const std::string& path, const StructuredModel& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << "structsvm-model v1 " << model_kind_name(m.kind) << ' ' << m.num_outputs << ' ' << m.feature_dim << '\n';
  char buf[64];
  for (double v : m.w) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

StructuredModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, version, kind;
  int outputs = 0, dim = 0;
  hs >> magic >> version >> kind >> outputs >> dim;
  if (magic != "structsvm-model" || version != "v1") throw Error(ErrorCode::Parse, path + ": not a v1 model file");
  StructuredModel m;
  if (kind == "chain") m.kind = ModelKind::Chain;
  else if (kind == "multilabel") m.kind = ModelKind::MultiLabel;
  else if (kind == "hierarchical") m.kind = ModelKind::Hierarchical;
  else throw Error(ErrorCode::Parse, path + ": unknown model kind '" + kind + "'");
  if (outputs <= 0 || dim <= 0) throw Error(ErrorCode::Parse, path + ": bad model dimensions");
  m.num_outputs = outputs;
  m.feature_dim = dim;
  const std::size_t n = StructuredModel::dimension(m.kind, outputs, dim);
  m.w.reserve(n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) throw Error(ErrorCode::Parse, path + ": bad weight '" + line + "'");
    m.w.push_back(v);
  }
  if (m.w.size() != n) throw Error(ErrorCode::Parse, path + ": expected " + std::to_string(n) + " weights");
  return m;
}

}  // namespace structsvm
