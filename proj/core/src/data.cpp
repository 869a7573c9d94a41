#include "structsvm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "structsvm/error.hpp"

namespace structsvm {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

int parse_int(const std::string& s, const std::string& where) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorCode::Parse, where + ": bad integer '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, where + ": bad number '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void add_feature(SparseVector& x, const std::string& item, int dim, const std::string& where) {
  const auto colon = item.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Parse, where + ": feature '" + item + "' needs idx:val");
  const int j = parse_int(item.substr(0, colon), where);
  if (j < 0 || (dim > 0 && j >= dim)) throw Error(ErrorCode::Parse, where + ": feature index out of range");
  x.entries.emplace_back(j, parse_double(item.substr(colon + 1), where));
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

SparseVector parse_token(const std::string& token, int dim) {
  SparseVector x;
  if (token.find(':') == std::string::npos) {
    x.entries.emplace_back(static_cast<int>(fnv1a(token) % static_cast<std::uint64_t>(dim)), 1.0);
    return x;
  }
  for (const auto& item : split(token, ',')) add_feature(x, item, dim, "token");
  return x;
}

std::string format_token(const SparseVector& x) {
  std::string out;
  for (std::size_t i = 0; i < x.entries.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(x.entries[i].first) + ":" + fmt(x.entries[i].second);
  }
  return out;
}

SequenceDataset read_sequences(const std::string& path) {
  auto in = open_in(path);
  SequenceDataset ds;
  int declared_states = 0, max_state = -1;
  SequenceExample cur;
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) ds.examples.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string key, val;
      is >> key >> val;
      if (key == "dim") ds.feature_dim = parse_int(val, where);
      else if (key == "states") declared_states = parse_int(val, where);
      continue;
    }
    if (ds.feature_dim <= 0) throw Error(ErrorCode::Parse, where + ": '#dim' pragma must come first");
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::Parse, where + ": expected token<TAB>state");
    const int s = parse_int(line.substr(tab + 1), where);
    if (s < 0) throw Error(ErrorCode::Parse, where + ": negative state");
    max_state = std::max(max_state, s);
    cur.tokens.push_back(parse_token(line.substr(0, tab), ds.feature_dim));
    cur.states.push_back(s);
  }
  flush();
  ds.num_states = declared_states > 0 ? declared_states : max_state + 1;
  if (max_state >= ds.num_states) throw Error(ErrorCode::Parse, path + ": state exceeds '#states'");
  if (ds.examples.empty()) throw Error(ErrorCode::Parse, path + ": no sequences");
  return ds;
}

void write_sequences(const std::string& path, const SequenceDataset& ds) {
  auto out = open_out(path);
  out << "#dim " << ds.feature_dim << "\n#states " << ds.num_states << "\n";
  for (const auto& ex : ds.examples) {
    for (std::size_t p = 0; p < ex.tokens.size(); ++p) out << format_token(ex.tokens[p]) << '\t' << ex.states[p] << '\n';
    out << '\n';
  }
}

MultiLabelDataset read_multilabel(const std::string& path) {
  auto in = open_in(path);
  MultiLabelDataset ds;
  int declared_labels = 0, max_label = -1, max_feat = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string key, val;
      is >> key >> val;
      if (key == "dim") ds.feature_dim = parse_int(val, where);
      else if (key == "labels") declared_labels = parse_int(val, where);
      continue;
    }
    std::istringstream is(line);
    std::string field;
    MultiLabelExample ex;
    bool first = true;
    while (is >> field) {
      if (first && field.find(':') == std::string::npos) {
        if (field != "-") {
          for (const auto& l : split(field, ',')) {
            const int v = parse_int(l, where);
            if (v < 0) throw Error(ErrorCode::Parse, where + ": negative label");
            ex.labels.push_back(v);
            max_label = std::max(max_label, v);
          }
        }
      } else {
        add_feature(ex.x, field, ds.feature_dim, where);
        max_feat = std::max(max_feat, ex.x.entries.back().first);
      }
      first = false;
    }
    std::sort(ex.labels.begin(), ex.labels.end());
    ex.labels.erase(std::unique(ex.labels.begin(), ex.labels.end()), ex.labels.end());
    ds.examples.push_back(std::move(ex));
  }
  if (ds.feature_dim <= 0) ds.feature_dim = max_feat + 1;
  ds.num_labels = declared_labels > 0 ? declared_labels : max_label + 1;
  if (max_label >= ds.num_labels) throw Error(ErrorCode::Parse, path + ": label exceeds '#labels'");
  if (ds.examples.empty()) throw Error(ErrorCode::Parse, path + ": no examples");
  return ds;
}

void write_multilabel(const std::string& path, const MultiLabelDataset& ds) {
  auto out = open_out(path);
  out << "#dim " << ds.feature_dim << "\n#labels " << ds.num_labels << "\n";
  for (const auto& ex : ds.examples) {
    if (ex.labels.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < ex.labels.size(); ++i) out << (i ? "," : "") << ex.labels[i];
    }
    for (const auto& [j, v] : ex.x.entries) out << ' ' << j << ':' << fmt(v);
    out << '\n';
  }
}

}  // namespace structsvm
