#include "guesr/encoders.hpp"

#include <cmath>
#include <unordered_map>

#include "guesr/errors.hpp"

namespace guesr {

LightGcnResult lightgcn_forward(Tape& tape, const ViewSample& view, Var item_table, Var alpha,
                                const GraphEncoderConfig& config) {
    if (view.nodes.empty()) throw Error("lightgcn_forward: empty view");
    const int layers = config.layers;
    if (tape.val(alpha).numel() != layers + 1)
        throw ShapeError("alpha must have L+1 entries, got " + shape_str(tape.val(alpha)));

    const int nv = int(view.nodes.size());
    std::unordered_map<int, int> index;
    index.reserve(size_t(nv));
    for (int i = 0; i < nv; ++i) index.emplace(view.nodes[i], i);

    // unweighted symmetric normalization with degrees counted inside the view
    std::vector<int> degree(nv, 0);
    for (const auto& [a, b, w] : view.edges) {
        ++degree[index.at(a)];
        ++degree[index.at(b)];
    }
    Tensor prop(nv, nv);
    for (const auto& [a, b, w] : view.edges) {
        const int i = index.at(a), j = index.at(b);
        const double coeff = 1.0 / std::sqrt(double(degree[i]) * double(degree[j]));
        prop.at(i, j) = coeff;
        prop.at(j, i) = coeff;
    }

    const Var p = tape.constant(std::move(prop));
    const Var e0 = tape.gather_rows(item_table, view.nodes);
    Var acc = tape.mul(e0, tape.slice_cols(alpha, 0, 1));
    Var cur = e0;
    for (int l = 1; l <= layers; ++l) {
        cur = tape.matmul(p, cur);
        acc = tape.add(acc, tape.mul(cur, tape.slice_cols(alpha, l, l + 1)));
    }

    LightGcnResult out;
    out.node_embeddings = acc;
    out.anchor_row = index.at(view.anchor);
    return out;
}

namespace {

Tensor row_mask(const std::vector<char>& valid, int cols) {
    Tensor mask(int(valid.size()), cols);
    for (size_t r = 0; r < valid.size(); ++r)
        if (valid[r])
            for (int c = 0; c < cols; ++c) mask.at(int(r), c) = 1.0;
    return mask;
}

}  // namespace

Var transformer_forward(Tape& tape, Var item_rows, const std::vector<char>& valid,
                        const TransformerVars& vars, const SeqEncoderConfig& config) {
    const Tensor& s_val = tape.val(item_rows);
    const int mw = s_val.rows;
    const int d = s_val.cols;
    if (int(valid.size()) != mw) throw ShapeError("mask length != sequence rows");
    if (d % config.heads != 0) throw ConfigError("dim must be divisible by heads");
    if (tape.val(vars.pos_table).rows < mw)
        throw ShapeError("positional table shorter than the window");

    // positions indexed by distance from the end: most recent item = row 0
    std::vector<int> pos_rows(size_t(mw), 0);
    for (int i = 0; i < mw; ++i) pos_rows[size_t(i)] = mw - 1 - i;
    Var x = tape.add(item_rows, tape.gather_rows(vars.pos_table, pos_rows));

    Tensor key_mask(mw, mw);
    for (int r = 0; r < mw; ++r)
        for (int c = 0; c < mw; ++c) key_mask.at(r, c) = valid[size_t(c)] ? 1.0 : 0.0;

    const int dh = d / config.heads;
    for (const auto& block : vars.blocks) {
        const Var q = tape.matmul(x, block.wq);
        const Var k = tape.matmul(x, block.wk);
        const Var v = tape.matmul(x, block.wv);
        std::vector<Var> heads;
        heads.reserve(size_t(config.heads));
        for (int h = 0; h < config.heads; ++h) {
            const Var qh = tape.slice_cols(q, h * dh, (h + 1) * dh);
            const Var kh = tape.slice_cols(k, h * dh, (h + 1) * dh);
            const Var vh = tape.slice_cols(v, h * dh, (h + 1) * dh);
            Var att = tape.scale(tape.matmul(qh, tape.transpose(kh)), 1.0 / std::sqrt(double(dh)));
            att = tape.softmax_rows(tape.masked_fill(att, key_mask, -1e30));
            heads.push_back(tape.matmul(att, vh));
        }
        x = tape.add(x, tape.matmul(tape.concat_cols(heads), block.wo));
        Var f = tape.relu(tape.add(tape.matmul(x, block.ffn_w1), block.ffn_b1));
        f = tape.add(tape.matmul(f, block.ffn_w2), block.ffn_b2);
        x = tape.add(x, f);
    }

    const Var z = tape.add(tape.matmul(x, vars.wz), item_rows);
    return tape.mul(z, tape.constant(row_mask(valid, d)));
}

Var gru_forward(Tape& tape, Var item_rows, const std::vector<char>& valid, const GruVars& vars) {
    const Tensor& s_val = tape.val(item_rows);
    const int mw = s_val.rows;
    const int d = s_val.cols;
    if (int(valid.size()) != mw) throw ShapeError("mask length != sequence rows");

    Var h = tape.constant(Tensor(1, d));
    std::vector<Var> states;
    states.reserve(size_t(mw));
    for (int t = 0; t < mw; ++t) {
        if (!valid[size_t(t)]) {
            states.push_back(h);
            continue;
        }
        const Var x = tape.slice_rows(item_rows, t, t + 1);
        const Var r = tape.sigmoid(
            tape.add(tape.add(tape.matmul(x, vars.wxr), tape.matmul(h, vars.whr)), vars.br));
        const Var u = tape.sigmoid(
            tape.add(tape.add(tape.matmul(x, vars.wxz), tape.matmul(h, vars.whz)), vars.bz));
        const Var n = tape.tanh(tape.add(
            tape.add(tape.matmul(x, vars.wxn), tape.mul(r, tape.matmul(h, vars.whn))), vars.bn));
        const Var keep = tape.add_const(tape.scale(u, -1.0), 1.0);  // 1 - u
        h = tape.add(tape.mul(keep, n), tape.mul(u, h));
        states.push_back(h);
    }

    const Var z = tape.add(tape.matmul(tape.concat_rows(states), vars.wz), item_rows);
    return tape.mul(z, tape.constant(row_mask(valid, d)));
}

}  // namespace guesr
