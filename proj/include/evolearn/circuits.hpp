#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "evolearn/genome.hpp"
#include "evolearn/task.hpp"

namespace evolearn {

// Layered CGP grid. Index space: primary inputs 1..n_inputs, then nodes
// numbered consecutively layer by layer, so layer L (1-based) covers
// n_inputs + 1 + (L - 1) * nodes_per_layer ... n_inputs + L * nodes_per_layer.
//
// Genotype layout: three genes per node in index order (function, input a,
// input b), followed by a single gene naming the output node.
struct CircuitLayout {
    int n_inputs = 5;
    int n_layers = 20;
    int nodes_per_layer = 20;

    static constexpr int genes_per_node = 3;

    int n_nodes() const { return n_layers * nodes_per_layer; }
    int total_genes() const { return n_nodes() * genes_per_node + 1; }
    int first_node_index() const { return n_inputs + 1; }
    int last_node_index() const { return n_inputs + n_nodes(); }
    int n_patterns() const { return 1 << n_inputs; }
    // Highest index a node in `layer` may read from.
    int max_source_index(int layer) const { return n_inputs + (layer - 1) * nodes_per_layer; }
};

enum class GateFunction : std::uint8_t { OR = 1, AND = 2, NAND = 3, NOR = 4 };

struct CircuitNode {
    GateFunction fn = GateFunction::OR;
    int in_a = 1;
    int in_b = 1;
    int layer = 1;
};

struct DecodedCircuit {
    CircuitLayout layout;
    std::vector<CircuitNode> nodes;  // nodes[k] has index layout.first_node_index() + k
    int output_node = 0;
};

// Truth tables are bit masks over input patterns: bit j holds the value for
// pattern j, where primary input i (1-based) takes bit (i - 1) of j.
using TruthTable = std::uint64_t;

GeneBounds circuit_bounds(const CircuitLayout& layout = {});

// Total on conforming genotypes; throws std::invalid_argument otherwise.
DecodedCircuit decode(const IntGenotype& g, const CircuitLayout& layout = {});

bool gate(GateFunction fn, bool a, bool b);

// Single-pattern evaluation.
bool eval_circuit(const DecodedCircuit& c, std::uint32_t pattern);

// All patterns at once, one bitwise operation per node.
TruthTable truth_table(const DecodedCircuit& c);

// 1 iff the pattern holds an even number of ones.
bool target_parity(std::uint32_t pattern);

TruthTable parity_truth_table(int n_inputs);

// Fraction of patterns mapped to the even-parity target; one step per pattern.
EvalOutcome parity_fitness(const DecodedCircuit& c);

// Debug netlist: "node_id layer fn in_a in_b" per node, then "output node_id".
void write_netlist(std::ostream& os, const DecodedCircuit& c);

class ParityTask final : public Task {
public:
    explicit ParityTask(CircuitLayout layout = {});

    const SharedBounds& bounds() const override { return bounds_; }
    EvalOutcome evaluate(const IntGenotype& g, Rng& rng) const override;
    bool deterministic() const override { return true; }

    const CircuitLayout& layout() const { return layout_; }

private:
    CircuitLayout layout_;
    SharedBounds bounds_;
};

}  // namespace evolearn
