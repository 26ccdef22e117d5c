#include "evolearn/circuits.hpp"

#include <bit>
#include <ostream>
#include <stdexcept>

namespace evolearn {

namespace {

void check_layout(const CircuitLayout& layout) {
    if (layout.n_inputs < 1 || layout.n_inputs > 6) throw std::invalid_argument("CircuitLayout: n_inputs must be in [1, 6]");
    if (layout.n_layers < 1 || layout.nodes_per_layer < 1) throw std::invalid_argument("CircuitLayout: empty grid");
}

TruthTable all_patterns_mask(int n_inputs) {
    const int n = 1 << n_inputs;
    return n == 64 ? ~TruthTable{0} : ((TruthTable{1} << n) - 1);
}

// Truth table of primary input i (1-based).
TruthTable input_column(int i, int n_inputs) {
    TruthTable t = 0;
    for (int j = 0; j < (1 << n_inputs); ++j) {
        if ((j >> (i - 1)) & 1) t |= TruthTable{1} << j;
    }
    return t;
}

}  // namespace

GeneBounds circuit_bounds(const CircuitLayout& layout) {
    check_layout(layout);
    GeneBounds b;
    for (int layer = 1; layer <= layout.n_layers; ++layer) {
        const int max_src = layout.max_source_index(layer);
        for (int k = 0; k < layout.nodes_per_layer; ++k) {
            b.push_back(1, 4);
            b.push_back(1, max_src);
            b.push_back(1, max_src);
        }
    }
    b.push_back(layout.first_node_index(), layout.last_node_index());
    return b;
}

DecodedCircuit decode(const IntGenotype& g, const CircuitLayout& layout) {
    check_layout(layout);
    if (static_cast<int>(g.size()) != layout.total_genes()) throw std::invalid_argument("decode: genotype length does not match layout");
    const auto genes = g.genes();

    DecodedCircuit c;
    c.layout = layout;
    c.nodes.resize(static_cast<std::size_t>(layout.n_nodes()));
    for (int k = 0; k < layout.n_nodes(); ++k) {
        const int layer = k / layout.nodes_per_layer + 1;
        const int max_src = layout.max_source_index(layer);
        const Gene fn = genes[3 * k];
        const Gene a = genes[3 * k + 1];
        const Gene b = genes[3 * k + 2];
        if (fn < 1 || fn > 4 || a < 1 || a > max_src || b < 1 || b > max_src) {
            throw std::invalid_argument("decode: genotype does not conform to circuit bounds");
        }
        c.nodes[k] = CircuitNode{static_cast<GateFunction>(fn), a, b, layer};
    }
    c.output_node = genes[3 * layout.n_nodes()];
    if (c.output_node < layout.first_node_index() || c.output_node > layout.last_node_index()) {
        throw std::invalid_argument("decode: output gene out of range");
    }
    return c;
}

bool gate(GateFunction fn, bool a, bool b) {
    switch (fn) {
        case GateFunction::OR: return a || b;
        case GateFunction::AND: return a && b;
        case GateFunction::NAND: return !(a && b);
        case GateFunction::NOR: return !(a || b);
    }
    return false;
}

bool eval_circuit(const DecodedCircuit& c, std::uint32_t pattern) {
    const int first = c.layout.first_node_index();
    std::vector<bool> value(static_cast<std::size_t>(c.layout.last_node_index() + 1), false);
    for (int i = 1; i <= c.layout.n_inputs; ++i) value[i] = (pattern >> (i - 1)) & 1u;
    for (std::size_t k = 0; k < c.nodes.size(); ++k) {
        const CircuitNode& n = c.nodes[k];
        value[first + k] = gate(n.fn, value[n.in_a], value[n.in_b]);
    }
    return value[c.output_node];
}

TruthTable truth_table(const DecodedCircuit& c) {
    const int n_in = c.layout.n_inputs;
    const int first = c.layout.first_node_index();
    const TruthTable full = all_patterns_mask(n_in);

    std::vector<TruthTable> value(static_cast<std::size_t>(c.layout.last_node_index() + 1), 0);
    for (int i = 1; i <= n_in; ++i) value[i] = input_column(i, n_in);
    for (std::size_t k = 0; k < c.nodes.size(); ++k) {
        const CircuitNode& n = c.nodes[k];
        const TruthTable a = value[n.in_a];
        const TruthTable b = value[n.in_b];
        TruthTable out;
        switch (n.fn) {
            case GateFunction::OR: out = a | b; break;
            case GateFunction::AND: out = a & b; break;
            case GateFunction::NAND: out = ~(a & b) & full; break;
            case GateFunction::NOR: out = ~(a | b) & full; break;
            default: out = 0;
        }
        value[first + k] = out;
    }
    return value[c.output_node];
}

bool target_parity(std::uint32_t pattern) { return std::popcount(pattern) % 2 == 0; }

TruthTable parity_truth_table(int n_inputs) {
    TruthTable t = 0;
    for (int j = 0; j < (1 << n_inputs); ++j) {
        if (target_parity(static_cast<std::uint32_t>(j))) t |= TruthTable{1} << j;
    }
    return t;
}

EvalOutcome parity_fitness(const DecodedCircuit& c) {
    const int n_patterns = c.layout.n_patterns();
    const TruthTable errors = truth_table(c) ^ parity_truth_table(c.layout.n_inputs);
    const int n_wrong = std::popcount(errors);
    return {1.0 - static_cast<double>(n_wrong) / n_patterns, n_patterns};
}

void write_netlist(std::ostream& os, const DecodedCircuit& c) {
    const int first = c.layout.first_node_index();
    for (std::size_t k = 0; k < c.nodes.size(); ++k) {
        const CircuitNode& n = c.nodes[k];
        os << first + static_cast<int>(k) << ' ' << n.layer << ' ' << static_cast<int>(n.fn) << ' ' << n.in_a << ' '
           << n.in_b << '\n';
    }
    os << "output " << c.output_node << '\n';
}

ParityTask::ParityTask(CircuitLayout layout)
    : layout_(layout), bounds_(std::make_shared<const GeneBounds>(circuit_bounds(layout))) {}

EvalOutcome ParityTask::evaluate(const IntGenotype& g, Rng&) const { return parity_fitness(decode(g, layout_)); }

}  // namespace evolearn
