#include <cstdio>
#include <iostream>

#include "commands.hpp"
#include "json.hpp"
#include "structsvm/synthetic.hpp"

namespace structsvm::cli {

int cmd_gen(const GenOptions& o) {
  nlohmann::json out{{"command", "gen"}, {"seed", o.seed}};
  if (!o.hier.empty()) {
    HierGenParams p;
    p.num_examples = o.n;
    p.depth = o.depth;
    p.feature_dim = o.d;
    p.seed = o.seed;
    const auto syn = o.hier == "balanced" ? generate_balanced_hierarchy(p) : generate_unbalanced_hierarchy(p);
    const std::string data = o.out + ".ml", hier = o.out + ".hier";
    write_multilabel(data, to_multilabel(syn));
    syn.spec.write(hier);
    out["data"] = data;
    out["hierarchy"] = hier;
    out["nodes"] = syn.spec.num_nodes();
    out["examples"] = syn.data.examples.size();
  } else if (o.chain) {
    PlantedChainParams p;
    p.num_examples = o.n;
    p.length = o.length;
    p.num_states = o.states;
    p.vocab_per_state = o.vocab;
    p.noise = o.noise;
    p.stickiness = o.stickiness;
    p.seed = o.seed;
    const auto ds = generate_planted_chains(p);
    const std::string data = o.out + ".seq";
    write_sequences(data, ds);
    out["data"] = data;
    out["examples"] = ds.examples.size();
  } else if (o.multilabel) {
    MultiLabelGenParams p;
    p.num_examples = o.n;
    p.num_labels = o.labels;
    p.feature_dim = o.d;
    p.threshold = o.threshold;
    p.seed = o.seed;
    const auto ds = generate_multilabel(p);
    const std::string data = o.out + ".ml";
    write_multilabel(data, ds);
    out["data"] = data;
    out["examples"] = ds.examples.size();
  } else {
    std::fprintf(stderr, "error: gen needs one of --hier, --chain or --multilabel\n");
    return kUsage;
  }
  std::cout << out.dump() << std::endl;
  return kOk;
}

}  // namespace structsvm::cli
