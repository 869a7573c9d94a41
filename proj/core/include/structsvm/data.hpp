#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace structsvm {

struct SparseVector {
  std::vector<std::pair<int, double>> entries;  // (index, value)

  double dot(const std::vector<double>& w, std::size_t offset = 0) const {
    double s = 0.0;
    for (const auto& [j, v] : entries) s += w[offset + static_cast<std::size_t>(j)] * v;
    return s;
  }
};

struct SequenceExample {
  std::vector<SparseVector> tokens;
  std::vector<int> states;
};

struct SequenceDataset {
  int feature_dim = 0;
  int num_states = 0;
  std::vector<SequenceExample> examples;
};

struct MultiLabelExample {
  SparseVector x;
  std::vector<int> labels;  // sorted, unique
};

struct MultiLabelDataset {
  int feature_dim = 0;
  int num_labels = 0;
  std::vector<MultiLabelExample> examples;
};

// FNV-1a, stable across platforms.
std::uint64_t fnv1a(const std::string& s);

// Token text: "idx:val,idx:val" for explicit features, otherwise a word hashed into one index.
SparseVector parse_token(const std::string& token, int dim);
std::string format_token(const SparseVector& x);

// Blocks of "token<TAB>state" separated by blank lines, after a "#dim D" pragma
// (optional "#states S"; otherwise max state + 1).
SequenceDataset read_sequences(const std::string& path);
void write_sequences(const std::string& path, const SequenceDataset& ds);

// Lines "l1,l2 idx:val idx:val" with optional "#dim D" and "#labels L" pragmas; "-" is the empty set.
MultiLabelDataset read_multilabel(const std::string& path);
void write_multilabel(const std::string& path, const MultiLabelDataset& ds);

}  // namespace structsvm
