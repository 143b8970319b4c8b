// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppgtts/config.hpp"
#include "ppgtts/tensor.hpp"

namespace ppgtts {

// One parameter tensor in the model: canonical name, shape, the fan-in used
// for uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) initialization, and the module
// the complexity analyzer attributes it to.
struct TensorSpec {
    std::string name;
    std::vector<int> shape;
    int fan_in = 1;
    std::string module;

    size_t numel() const { return Tensor::numel_of(shape); }
};

// Full parameter inventory for a config, in a fixed order. init_weights, the
// parameter counter and store validation all derive from this single list.
std::vector<TensorSpec> tensor_inventory(const ModelConfig& cfg);

bool module_in_scope(const std::string& module, Scope scope);

// Ordered name -> tensor container.
class WeightStore {
public:
    void insert(const std::string& name, Tensor t);
    bool contains(const std::string& name) const { return index_.count(name) > 0; }
    const Tensor& get(const std::string& name) const;
    const Tensor& get(const std::string& name, const std::vector<int>& expected_shape) const;
    Tensor& mutable_get(const std::string& name);
    const std::vector<std::string>& names() const { return order_; }
    size_t size() const { return order_.size(); }

private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, Tensor> index_;
};

// Seeded-random store covering the whole inventory. Per-tensor sub-seed is
// tensor_seed(name, master_seed).
WeightStore init_weights(const ModelConfig& cfg, uint64_t seed);

// Every inventory tensor for the scope must be present and shape-correct.
void validate_store(const WeightStore& store, const ModelConfig& cfg, Scope scope);

// Binary tensor container ("ADVT", version 1, little-endian f32 payloads).
void save_weights(const WeightStore& store, const std::string& path);
WeightStore load_weights(const std::string& path);

// Typed access used by the templated model builders: casts the stored f32
// tensor to the compute scalar and, for derivative checks, attaches either a
// tangent direction or a value offset along it.
template <class T>
struct WeightSource {
    const WeightStore* store = nullptr;
    const std::unordered_map<std::string, std::vector<double>>* direction = nullptr;
    double offset = 0.0;   // FD probes: value += offset * direction
    bool tangent = false;  // dual runs: tangent = direction

    TensorT<T> get(const std::string& name, const std::vector<int>& shape) const {
        const Tensor& base = store->get(name, shape);
        TensorT<T> out(base.shape);
        const std::vector<double>* dir = nullptr;
        if (direction) {
            auto it = direction->find(name);
            if (it != direction->end()) dir = &it->second;
        }
        for (size_t i = 0; i < base.data.size(); ++i) {
            double v = static_cast<double>(base.data[i]);
            double d = dir ? (*dir)[i] : 0.0;
            if constexpr (std::is_same_v<T, Dual<double>>) {
                out.data[i] = tangent ? Dual<double>(v + offset * d, d) : Dual<double>(v + offset * d, 0.0);
            } else {
                out.data[i] = T(v + offset * d);
            }
        }
        return out;
    }
};

inline WeightSource<float> float_source(const WeightStore& store) { return {&store}; }

}  // namespace ppgtts
