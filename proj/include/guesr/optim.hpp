#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "guesr/tape.hpp"
#include "guesr/tensor.hpp"

namespace guesr {

// Named learnable tensors plus their Adam moments. Shapes are fixed at
// registration; the step counter is shared across parameters.
class ParamStore {
public:
    void register_param(const std::string& name, Tensor init);

    Tensor& value(const std::string& name);
    const Tensor& value(const std::string& name) const;
    bool has(const std::string& name) const { return params_.count(name) > 0; }

    const std::map<std::string, Tensor>& values() const;
    std::map<std::string, Tensor> snapshot() const;

    int64_t step() const { return step_; }

    void save(const std::string& path, const std::map<std::string, Tensor>& extra = {}) const;

    friend void adam_step(ParamStore& store, const std::map<std::string, Tensor>& grads,
                          double lr, double beta1, double beta2, double eps);

private:
    struct Slot {
        Tensor value, m, v;
    };
    std::map<std::string, Slot> params_;
    mutable std::map<std::string, Tensor> view_;  // rebuilt on demand for values()
    int64_t step_ = 0;
};

void adam_step(ParamStore& store, const std::map<std::string, Tensor>& grads, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// |a-b| scaled by max(1, |a|, |b|); the comparison used by grad_check.
double relative_error(double a, double b);

struct GradCheckResult {
    bool pass = false;
    double max_rel_err = 0.0;
    std::string worst;  // "input i element j" of the worst entry
};

using ExprBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

// Compares backward() against central finite differences on every element of
// every input, at the given step size.
GradCheckResult grad_check(const ExprBuilder& f, const std::vector<Tensor>& inputs, double tol,
                           double step = 1e-5);

}  // namespace guesr
