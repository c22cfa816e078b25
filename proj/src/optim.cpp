#include "guesr/optim.hpp"

#include <cmath>

#include "guesr/errors.hpp"

namespace guesr {

void ParamStore::register_param(const std::string& name, Tensor init) {
    if (params_.count(name)) throw Error("parameter already registered: " + name);
    Slot slot;
    slot.m = Tensor(init.rows, init.cols);
    slot.v = Tensor(init.rows, init.cols);
    slot.value = std::move(init);
    params_.emplace(name, std::move(slot));
}

Tensor& ParamStore::value(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + name);
    return it->second.value;
}

const Tensor& ParamStore::value(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + name);
    return it->second.value;
}

const std::map<std::string, Tensor>& ParamStore::values() const {
    view_.clear();
    for (const auto& [name, slot] : params_) view_.emplace(name, slot.value);
    return view_;
}

std::map<std::string, Tensor> ParamStore::snapshot() const {
    std::map<std::string, Tensor> out;
    for (const auto& [name, slot] : params_) out.emplace(name, slot.value);
    return out;
}

void ParamStore::save(const std::string& path, const std::map<std::string, Tensor>& extra) const {
    std::map<std::string, Tensor> all = snapshot();
    for (const auto& [name, t] : extra) {
        if (all.count(name)) throw Error("extra tensor shadows parameter: " + name);
        all.emplace(name, t);
    }
    save_tensors(path, all);
}

void adam_step(ParamStore& store, const std::map<std::string, Tensor>& grads, double lr,
               double beta1, double beta2, double eps) {
    for (const auto& [name, g] : grads)
        if (!store.params_.count(name)) throw Error("gradient for unknown parameter: " + name);
    store.step_ += 1;
    const double bc1 = 1.0 - std::pow(beta1, double(store.step_));
    const double bc2 = 1.0 - std::pow(beta2, double(store.step_));
    for (auto& [name, slot] : store.params_) {
        auto it = grads.find(name);
        if (it == grads.end()) throw Error("missing gradient for parameter: " + name);
        const Tensor& g = it->second;
        if (!g.same_shape(slot.value))
            throw ShapeError("gradient shape " + shape_str(g) + " vs parameter " +
                             shape_str(slot.value) + " for " + name);
        for (int i = 0; i < g.numel(); ++i) {
            slot.m.v[i] = beta1 * slot.m.v[i] + (1.0 - beta1) * g.v[i];
            slot.v.v[i] = beta2 * slot.v.v[i] + (1.0 - beta2) * g.v[i] * g.v[i];
            const double mhat = slot.m.v[i] / bc1;
            const double vhat = slot.v.v[i] / bc2;
            slot.value.v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

double relative_error(double a, double b) {
    return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

GradCheckResult grad_check(const ExprBuilder& f, const std::vector<Tensor>& inputs, double tol,
                           double step) {
    // analytic pass
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(inputs.size());
    for (const auto& t : inputs) leaves.push_back(tape.leaf(t));
    Var loss = f(tape, leaves);
    if (tape.val(loss).numel() != 1) throw ShapeError("grad_check: expression must be scalar");
    tape.backward(loss);

    auto eval_at = [&](const std::vector<Tensor>& point) {
        Tape t;
        std::vector<Var> ls;
        ls.reserve(point.size());
        for (const auto& x : point) ls.push_back(t.leaf(x));
        return t.scalar(f(t, ls));
    };

    GradCheckResult result;
    result.pass = true;
    std::vector<Tensor> point = inputs;
    for (size_t i = 0; i < inputs.size(); ++i) {
        const Tensor& analytic = tape.grad(leaves[i]);
        for (int j = 0; j < inputs[i].numel(); ++j) {
            const double orig = point[i].v[j];
            point[i].v[j] = orig + step;
            const double fp = eval_at(point);
            point[i].v[j] = orig - step;
            const double fm = eval_at(point);
            point[i].v[j] = orig;
            const double numeric = (fp - fm) / (2.0 * step);
            const double err = relative_error(analytic.v[j], numeric);
            if (err > result.max_rel_err) {
                result.max_rel_err = err;
                result.worst = "input " + std::to_string(i) + " element " + std::to_string(j);
            }
        }
    }
    result.pass = result.max_rel_err < tol;
    return result;
}

}  // namespace guesr
