#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "evolearn/circuits.hpp"
#include "evolearn/genome.hpp"
#include "evolearn/task.hpp"

namespace evolearn::testing {

// Hand-wired CGP genotypes on the default 5-input, 20x20 layout.
class CircuitBuilder {
public:
    CircuitBuilder() : genes_(static_cast<std::size_t>(layout_.total_genes()), 1) {
        // Unused nodes: OR(x1, x1).
        genes_.back() = layout_.first_node_index();
    }

    // Index of position k (0-based) in layer (1-based).
    int node(int layer, int k) const { return layout_.n_inputs + (layer - 1) * layout_.nodes_per_layer + k + 1; }

    int set(int layer, int k, GateFunction fn, int a, int b) {
        const int id = node(layer, k);
        const auto base = static_cast<std::size_t>((id - layout_.first_node_index()) * CircuitLayout::genes_per_node);
        genes_[base] = static_cast<Gene>(fn);
        genes_[base + 1] = a;
        genes_[base + 2] = b;
        return id;
    }

    // XOR over two layers: AND(OR(a, b), NAND(a, b)).
    int xor_gate(int layer, int k, int a, int b) {
        const int o = set(layer, 2 * k, GateFunction::OR, a, b);
        const int n = set(layer, 2 * k + 1, GateFunction::NAND, a, b);
        return set(layer + 1, k, GateFunction::AND, o, n);
    }

    // XNOR over two layers: OR(AND(a, b), NOR(a, b)).
    int xnor_gate(int layer, int k, int a, int b) {
        const int an = set(layer, 2 * k, GateFunction::AND, a, b);
        const int no = set(layer, 2 * k + 1, GateFunction::NOR, a, b);
        return set(layer + 1, k, GateFunction::OR, an, no);
    }

    void output(int id) { genes_.back() = id; }

    IntGenotype build() const {
        return IntGenotype(genes_, std::make_shared<const GeneBounds>(circuit_bounds(layout_)));
    }

private:
    CircuitLayout layout_;
    std::vector<Gene> genes_;
};

inline IntGenotype even_parity_circuit() {
    CircuitBuilder b;
    const int x12 = b.xor_gate(1, 0, 1, 2);
    const int x123 = b.xor_gate(3, 0, x12, 3);
    const int x1234 = b.xor_gate(5, 0, x123, 4);
    b.output(b.xnor_gate(7, 0, x1234, 5));
    return b.build();
}

inline IntGenotype constant_circuit(bool value) {
    CircuitBuilder b;
    const int not_x1 = b.set(1, 0, GateFunction::NOR, 1, 1);
    b.output(b.set(2, 0, value ? GateFunction::OR : GateFunction::AND, 1, not_x1));
    return b.build();
}

// Recursive evaluation straight from the raw genes, sharing no code with the
// decoder or the bit-parallel evaluator.
class RecursiveOracle {
public:
    explicit RecursiveOracle(const IntGenotype& g) : genes_(g.genes().begin(), g.genes().end()) {}

    bool output(std::uint32_t pattern) {
        memo_.clear();
        return value(genes_.back(), pattern);
    }

private:
    bool value(Gene id, std::uint32_t pattern) {
        if (id <= 5) return (pattern >> (id - 1)) & 1U;
        if (auto it = memo_.find(id); it != memo_.end()) return it->second;
        const auto base = static_cast<std::size_t>(id - 6) * 3;
        const bool a = value(genes_[base + 1], pattern);
        const bool b = value(genes_[base + 2], pattern);
        bool out = false;
        switch (genes_[base]) {
            case 1: out = a || b; break;
            case 2: out = a && b; break;
            case 3: out = !(a && b); break;
            case 4: out = !(a || b); break;
            default: throw std::logic_error("RecursiveOracle: bad function gene");
        }
        memo_[id] = out;
        return out;
    }

    std::vector<Gene> genes_;
    std::unordered_map<Gene, bool> memo_;
};

// Forwards to another task and audits every evaluation. Reports itself as
// non-deterministic unless told otherwise, which disables outcome replay.
class AuditTask final : public Task {
public:
    explicit AuditTask(const Task& inner, bool deterministic = false) : inner_(inner), deterministic_(deterministic) {}

    const SharedBounds& bounds() const override { return inner_.bounds(); }

    EvalOutcome evaluate(const IntGenotype& g, Rng& rng) const override {
        const EvalOutcome out = inner_.evaluate(g, rng);
        ++calls;
        steps += out.steps;
        return out;
    }

    bool deterministic() const override { return deterministic_; }

    mutable std::int64_t calls = 0;
    mutable std::int64_t steps = 0;

private:
    const Task& inner_;
    bool deterministic_;
};

}  // namespace evolearn::testing
