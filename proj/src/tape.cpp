#include "guesr/tape.hpp"

#include <algorithm>
#include <cmath>

#include "guesr/errors.hpp"

namespace guesr {

namespace {

// C += A * B
void mm_nn(const Tensor& a, const Tensor& b, Tensor& c) {
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.v[size_t(i) * a.cols];
        double* crow = &c.v[size_t(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = &b.v[size_t(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
}

// dA += dC * B^T
void mm_nt_acc(const Tensor& dc, const Tensor& b, Tensor& da) {
    for (int i = 0; i < dc.rows; ++i) {
        const double* crow = &dc.v[size_t(i) * dc.cols];
        double* arow = &da.v[size_t(i) * da.cols];
        for (int k = 0; k < b.rows; ++k) {
            const double* brow = &b.v[size_t(k) * b.cols];
            double acc = 0.0;
            for (int j = 0; j < dc.cols; ++j) acc += crow[j] * brow[j];
            arow[k] += acc;
        }
    }
}

// dB += A^T * dC
void mm_tn_acc(const Tensor& a, const Tensor& dc, Tensor& db) {
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.v[size_t(i) * a.cols];
        const double* crow = &dc.v[size_t(i) * dc.cols];
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            double* brow = &db.v[size_t(k) * db.cols];
            for (int j = 0; j < dc.cols; ++j) brow[j] += aik * crow[j];
        }
    }
}

void add_scaled(Tensor& dst, const Tensor& src, double s) {
    for (size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += s * src.v[i];
}

}  // namespace

int Tape::push(Tensor value, bool track, const char* op) {
    if (!value.all_finite())
        throw NumericError(std::string("non-finite result in op '") + op + "' " + shape_str(value));
    nodes_.push_back(Node{std::move(value), Tensor(), nullptr, track});
    grads_ready_ = false;
    return int(nodes_.size()) - 1;
}

Var Tape::constant(Tensor t) { return Var{push(std::move(t), false, "constant")}; }

Var Tape::leaf(Tensor t) { return Var{push(std::move(t), true, "leaf")}; }

Var Tape::binary_add(Var a, Var b, double sign, const char* op) {
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    enum class Mode { same, row, scalar } mode;
    if (B.same_shape(A))
        mode = Mode::same;
    else if (B.rows == 1 && B.cols == A.cols)
        mode = Mode::row;
    else if (B.numel() == 1)
        mode = Mode::scalar;
    else
        throw ShapeError(std::string(op) + ": " + shape_str(A) + " vs " + shape_str(B));

    Tensor out = A;
    switch (mode) {
        case Mode::same:
            for (int i = 0; i < out.numel(); ++i) out.v[i] += sign * B.v[i];
            break;
        case Mode::row:
            for (int r = 0; r < out.rows; ++r)
                for (int c = 0; c < out.cols; ++c) out.at(r, c) += sign * B.v[c];
            break;
        case Mode::scalar:
            for (double& x : out.v) x += sign * B.v[0];
            break;
    }
    Var v{push(std::move(out), tracked(a) || tracked(b), op)};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, b, sign, mode](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        if (t.tracked(a)) add_scaled(t.grad_ref(a), g, 1.0);
        if (!t.tracked(b)) return;
        Tensor& gb = t.grad_ref(b);
        switch (mode) {
            case Mode::same:
                add_scaled(gb, g, sign);
                break;
            case Mode::row:
                for (int r = 0; r < g.rows; ++r)
                    for (int c = 0; c < g.cols; ++c) gb.v[c] += sign * g.at(r, c);
                break;
            case Mode::scalar: {
                double acc = 0.0;
                for (double x : g.v) acc += x;
                gb.v[0] += sign * acc;
                break;
            }
        }
    };
    return v;
}

Var Tape::add(Var a, Var b) { return binary_add(a, b, 1.0, "add"); }
Var Tape::sub(Var a, Var b) { return binary_add(a, b, -1.0, "sub"); }

Var Tape::mul(Var a, Var b) {
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    const bool a_scalar = A.numel() == 1 && B.numel() > 1;
    const bool b_scalar = B.numel() == 1 && A.numel() > 1;
    if (!a_scalar && !b_scalar && !A.same_shape(B))
        throw ShapeError("mul: " + shape_str(A) + " vs " + shape_str(B));

    Tensor out = a_scalar ? B : A;
    if (a_scalar)
        for (double& x : out.v) x *= A.v[0];
    else if (b_scalar)
        for (double& x : out.v) x *= B.v[0];
    else
        for (int i = 0; i < out.numel(); ++i) out.v[i] *= B.v[i];

    Var v{push(std::move(out), tracked(a) || tracked(b), "mul")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, b, a_scalar, b_scalar](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& A = t.val(a);
        const Tensor& B = t.val(b);
        if (t.tracked(a)) {
            Tensor& ga = t.grad_ref(a);
            if (a_scalar) {
                double acc = 0.0;
                for (int i = 0; i < g.numel(); ++i) acc += g.v[i] * B.v[i];
                ga.v[0] += acc;
            } else if (b_scalar) {
                add_scaled(ga, g, B.v[0]);
            } else {
                for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] * B.v[i];
            }
        }
        if (t.tracked(b)) {
            Tensor& gb = t.grad_ref(b);
            if (b_scalar) {
                double acc = 0.0;
                for (int i = 0; i < g.numel(); ++i) acc += g.v[i] * A.v[i];
                gb.v[0] += acc;
            } else if (a_scalar) {
                add_scaled(gb, g, A.v[0]);
            } else {
                for (int i = 0; i < g.numel(); ++i) gb.v[i] += g.v[i] * A.v[i];
            }
        }
    };
    return v;
}

Var Tape::div(Var a, Var b) {
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    const bool b_scalar = B.numel() == 1 && A.numel() > 1;
    if (!b_scalar && !A.same_shape(B))
        throw ShapeError("div: " + shape_str(A) + " vs " + shape_str(B));

    Tensor out = A;
    if (b_scalar)
        for (double& x : out.v) x /= B.v[0];
    else
        for (int i = 0; i < out.numel(); ++i) out.v[i] /= B.v[i];

    Var v{push(std::move(out), tracked(a) || tracked(b), "div")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, b, b_scalar](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& A = t.val(a);
        const Tensor& B = t.val(b);
        if (t.tracked(a)) {
            Tensor& ga = t.grad_ref(a);
            if (b_scalar)
                add_scaled(ga, g, 1.0 / B.v[0]);
            else
                for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] / B.v[i];
        }
        if (t.tracked(b)) {
            Tensor& gb = t.grad_ref(b);
            if (b_scalar) {
                double acc = 0.0;
                for (int i = 0; i < g.numel(); ++i) acc += g.v[i] * A.v[i];
                gb.v[0] -= acc / (B.v[0] * B.v[0]);
            } else {
                for (int i = 0; i < g.numel(); ++i) gb.v[i] -= g.v[i] * A.v[i] / (B.v[i] * B.v[i]);
            }
        }
    };
    return v;
}

Var Tape::scale(Var a, double c) {
    Tensor out = val(a);
    for (double& x : out.v) x *= c;
    Var v{push(std::move(out), tracked(a), "scale")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, c](Tape& t) {
        add_scaled(t.grad_ref(a), t.nodes_[self].grad, c);
    };
    return v;
}

Var Tape::add_const(Var a, double c) {
    Tensor out = val(a);
    for (double& x : out.v) x += c;
    Var v{push(std::move(out), tracked(a), "add_const")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        add_scaled(t.grad_ref(a), t.nodes_[self].grad, 1.0);
    };
    return v;
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    if (A.cols != B.rows)
        throw ShapeError("matmul: " + shape_str(A) + " vs " + shape_str(B));
    Tensor out(A.rows, B.cols);
    mm_nn(A, B, out);
    Var v{push(std::move(out), tracked(a) || tracked(b), "matmul")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, b](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        if (t.tracked(a)) mm_nt_acc(g, t.val(b), t.grad_ref(a));
        if (t.tracked(b)) mm_tn_acc(t.val(a), g, t.grad_ref(b));
    };
    return v;
}

Var Tape::transpose(Var a) {
    const Tensor& A = val(a);
    Tensor out(A.cols, A.rows);
    for (int r = 0; r < A.rows; ++r)
        for (int c = 0; c < A.cols; ++c) out.at(c, r) = A.at(r, c);
    Var v{push(std::move(out), tracked(a), "transpose")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        Tensor& ga = t.grad_ref(a);
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) ga.at(c, r) += g.at(r, c);
    };
    return v;
}

Var Tape::gather_rows(Var table, std::vector<int> rows) {
    const Tensor& T = val(table);
    Tensor out(int(rows.size()), T.cols);
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= T.rows)
            throw ShapeError("gather_rows: row " + std::to_string(rows[k]) + " out of " +
                             shape_str(T));
        std::copy_n(&T.v[size_t(rows[k]) * T.cols], T.cols, &out.v[k * size_t(T.cols)]);
    }
    Var v{push(std::move(out), tracked(table), "gather_rows")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, table, rows = std::move(rows)](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        Tensor& gt = t.grad_ref(table);
        for (size_t k = 0; k < rows.size(); ++k) {
            double* dst = &gt.v[size_t(rows[k]) * gt.cols];
            const double* src = &g.v[k * size_t(g.cols)];
            for (int c = 0; c < g.cols; ++c) dst[c] += src[c];
        }
    };
    return v;
}

Var Tape::concat_rows(const std::vector<Var>& xs) {
    if (xs.empty()) throw ShapeError("concat_rows: empty input");
    const int cols = val(xs[0]).cols;
    int rows = 0;
    bool track = false;
    for (Var x : xs) {
        if (val(x).cols != cols)
            throw ShapeError("concat_rows: " + shape_str(val(xs[0])) + " vs " + shape_str(val(x)));
        rows += val(x).rows;
        track = track || tracked(x);
    }
    Tensor out(rows, cols);
    int r0 = 0;
    for (Var x : xs) {
        const Tensor& X = val(x);
        std::copy(X.v.begin(), X.v.end(), out.v.begin() + size_t(r0) * cols);
        r0 += X.rows;
    }
    Var v{push(std::move(out), track, "concat_rows")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, xs](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        int r0 = 0;
        for (Var x : xs) {
            const int nr = t.val(x).rows;
            if (t.tracked(x)) {
                Tensor& gx = t.grad_ref(x);
                for (int i = 0; i < nr * g.cols; ++i) gx.v[i] += g.v[size_t(r0) * g.cols + i];
            }
            r0 += nr;
        }
    };
    return v;
}

Var Tape::concat_cols(const std::vector<Var>& xs) {
    if (xs.empty()) throw ShapeError("concat_cols: empty input");
    const int rows = val(xs[0]).rows;
    int cols = 0;
    bool track = false;
    for (Var x : xs) {
        if (val(x).rows != rows)
            throw ShapeError("concat_cols: " + shape_str(val(xs[0])) + " vs " + shape_str(val(x)));
        cols += val(x).cols;
        track = track || tracked(x);
    }
    Tensor out(rows, cols);
    int c0 = 0;
    for (Var x : xs) {
        const Tensor& X = val(x);
        for (int r = 0; r < rows; ++r)
            std::copy_n(&X.v[size_t(r) * X.cols], X.cols, &out.v[size_t(r) * cols + c0]);
        c0 += X.cols;
    }
    Var v{push(std::move(out), track, "concat_cols")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, xs](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        int c0 = 0;
        for (Var x : xs) {
            const Tensor& X = t.val(x);
            if (t.tracked(x)) {
                Tensor& gx = t.grad_ref(x);
                for (int r = 0; r < g.rows; ++r)
                    for (int c = 0; c < X.cols; ++c) gx.at(r, c) += g.at(r, c0 + c);
            }
            c0 += X.cols;
        }
    };
    return v;
}

Var Tape::slice_rows(Var a, int r0, int r1) {
    const Tensor& A = val(a);
    if (r0 < 0 || r1 > A.rows || r0 >= r1)
        throw ShapeError("slice_rows [" + std::to_string(r0) + "," + std::to_string(r1) + ") of " +
                         shape_str(A));
    Tensor out(r1 - r0, A.cols);
    std::copy_n(&A.v[size_t(r0) * A.cols], out.v.size(), out.v.begin());
    Var v{push(std::move(out), tracked(a), "slice_rows")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, r0](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        Tensor& ga = t.grad_ref(a);
        for (size_t i = 0; i < g.v.size(); ++i) ga.v[size_t(r0) * ga.cols + i] += g.v[i];
    };
    return v;
}

Var Tape::slice_cols(Var a, int c0, int c1) {
    const Tensor& A = val(a);
    if (c0 < 0 || c1 > A.cols || c0 >= c1)
        throw ShapeError("slice_cols [" + std::to_string(c0) + "," + std::to_string(c1) + ") of " +
                         shape_str(A));
    Tensor out(A.rows, c1 - c0);
    for (int r = 0; r < A.rows; ++r)
        std::copy_n(&A.v[size_t(r) * A.cols + c0], c1 - c0, &out.v[size_t(r) * out.cols]);
    Var v{push(std::move(out), tracked(a), "slice_cols")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, c0](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        Tensor& ga = t.grad_ref(a);
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) ga.at(r, c0 + c) += g.at(r, c);
    };
    return v;
}

Var Tape::softmax_rows(Var a) {
    const Tensor& A = val(a);
    Tensor out(A.rows, A.cols);
    for (int r = 0; r < A.rows; ++r) {
        double mx = A.at(r, 0);
        for (int c = 1; c < A.cols; ++c) mx = std::max(mx, A.at(r, c));
        double z = 0.0;
        for (int c = 0; c < A.cols; ++c) {
            const double e = std::exp(A.at(r, c) - mx);
            out.at(r, c) = e;
            z += e;
        }
        for (int c = 0; c < A.cols; ++c) out.at(r, c) /= z;
    }
    Var v{push(std::move(out), tracked(a), "softmax_rows")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& y = t.nodes_[self].val;
        Tensor& ga = t.grad_ref(a);
        for (int r = 0; r < g.rows; ++r) {
            double dot = 0.0;
            for (int c = 0; c < g.cols; ++c) dot += g.at(r, c) * y.at(r, c);
            for (int c = 0; c < g.cols; ++c) ga.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
        }
    };
    return v;
}

Var Tape::masked_fill(Var a, Tensor mask, double fill) {
    const Tensor& A = val(a);
    if (!mask.same_shape(A))
        throw ShapeError("masked_fill: " + shape_str(A) + " vs mask " + shape_str(mask));
    Tensor out = A;
    for (int i = 0; i < out.numel(); ++i)
        if (mask.v[i] == 0.0) out.v[i] = fill;
    Var v{push(std::move(out), tracked(a), "masked_fill")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, mask = std::move(mask)](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i)
            if (mask.v[i] != 0.0) ga.v[i] += g.v[i];
    };
    return v;
}

Var Tape::relu(Var a) {
    Tensor out = val(a);
    for (double& x : out.v) x = x > 0.0 ? x : 0.0;
    Var v{push(std::move(out), tracked(a), "relu")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i)
            if (x.v[i] > 0.0) ga.v[i] += g.v[i];
    };
    return v;
}

Var Tape::sigmoid(Var a) {
    Tensor out = val(a);
    for (double& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
    Var v{push(std::move(out), tracked(a), "sigmoid")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& y = t.nodes_[self].val;
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] * y.v[i] * (1.0 - y.v[i]);
    };
    return v;
}

Var Tape::exp(Var a) {
    Tensor out = val(a);
    for (double& x : out.v) x = std::exp(x);
    Var v{push(std::move(out), tracked(a), "exp")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& y = t.nodes_[self].val;
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] * y.v[i];
    };
    return v;
}

Var Tape::log(Var a) {
    Tensor out = val(a);
    for (double& x : out.v) x = std::log(x);
    Var v{push(std::move(out), tracked(a), "log")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] / x.v[i];
    };
    return v;
}

Var Tape::tanh(Var a) {
    Tensor out = val(a);
    for (double& x : out.v) x = std::tanh(x);
    Var v{push(std::move(out), tracked(a), "tanh")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& y = t.nodes_[self].val;
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] * (1.0 - y.v[i] * y.v[i]);
    };
    return v;
}

Var Tape::sqrt(Var a) {
    Tensor out = val(a);
    for (double& x : out.v) x = std::sqrt(x);
    Var v{push(std::move(out), tracked(a), "sqrt")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& y = t.nodes_[self].val;
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] * 0.5 / y.v[i];
    };
    return v;
}

Var Tape::clamp(Var a, double lo, double hi) {
    Tensor out = val(a);
    for (double& x : out.v) x = std::min(hi, std::max(lo, x));
    Var v{push(std::move(out), tracked(a), "clamp")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, lo, hi](Tape& t) {
        const Tensor& g = t.nodes_[self].grad;
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_ref(a);
        for (int i = 0; i < g.numel(); ++i)
            if (x.v[i] > lo && x.v[i] < hi) ga.v[i] += g.v[i];
    };
    return v;
}

Var Tape::sum(Var a) {
    double acc = 0.0;
    for (double x : val(a).v) acc += x;
    Var v{push(Tensor::scalar(acc), tracked(a), "sum")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a](Tape& t) {
        const double g = t.nodes_[self].grad.v[0];
        Tensor& ga = t.grad_ref(a);
        for (double& x : ga.v) x += g;
    };
    return v;
}

Var Tape::mean(Var a) {
    const int n = val(a).numel();
    double acc = 0.0;
    for (double x : val(a).v) acc += x;
    Var v{push(Tensor::scalar(acc / n), tracked(a), "mean")};
    if (!nodes_[v.id].track) return v;
    nodes_[v.id].back = [self = v.id, a, n](Tape& t) {
        const double g = t.nodes_[self].grad.v[0] / n;
        Tensor& ga = t.grad_ref(a);
        for (double& x : ga.v) x += g;
    };
    return v;
}

Var Tape::l2_norm(Var a) { return sqrt(sum(mul(a, a))); }

void Tape::backward(Var loss) {
    if (!loss.valid() || val(loss).numel() != 1)
        throw ShapeError("backward: loss must be scalar, got " + shape_str(val(loss)));
    for (auto& n : nodes_)
        if (n.track) n.grad = Tensor(n.val.rows, n.val.cols);
    nodes_[loss.id].grad.v[0] = 1.0;
    for (int id = loss.id; id >= 0; --id) {
        Node& n = nodes_[id];
        if (n.track && n.back) n.back(*this);
    }
    grads_ready_ = true;
}

const Tensor& Tape::grad(Var v) const {
    if (!grads_ready_) throw Error("grad() before backward()");
    if (!nodes_[v.id].track) throw Error("grad() of untracked node");
    return nodes_[v.id].grad;
}

}  // namespace guesr
