#pragma once

#include <cstdint>

#include "structsvm/data.hpp"
#include "structsvm/hierarchy.hpp"

namespace structsvm {

// Each state emits tokens from its own vocabulary block; states follow a sticky Markov chain.
// noise is the chance that a token is drawn from a uniformly random state's block instead.
struct PlantedChainParams {
  int num_examples = 200;
  int length = 8;
  int num_states = 4;
  int vocab_per_state = 5;
  double stickiness = 0.6;
  double noise = 0.0;
  std::uint64_t seed = 1;
};
SequenceDataset generate_planted_chains(const PlantedChainParams& p);

// Labels are the rows of a planted Gaussian matrix whose score exceeds the threshold
// (the best-scoring label when none does).
struct MultiLabelGenParams {
  int num_examples = 200;
  int num_labels = 6;
  int feature_dim = 20;
  double threshold = 0.3;
  std::uint64_t seed = 1;
};
MultiLabelDataset generate_multilabel(const MultiLabelGenParams& p);

struct HierGenParams {
  int num_examples = 2000;
  int depth = 4;
  int feature_dim = 50;
  std::uint64_t seed = 1;
};

struct HierSynthetic {
  HierarchySpec spec;
  HierDataset data;
};

// Recursive hyperplane splits: at every level one side becomes a leaf, the other recurses.
// x ~ N(0, I) scaled to unit length; two top-level nodes, no global root.
HierSynthetic generate_unbalanced_hierarchy(const HierGenParams& p);
// Complete binary forest of the given depth; labels are the argmax of planted path potentials.
HierSynthetic generate_balanced_hierarchy(const HierGenParams& p);

// Ancestor-closed label sets for writing with write_multilabel.
MultiLabelDataset to_multilabel(const HierSynthetic& h);

}  // namespace structsvm
