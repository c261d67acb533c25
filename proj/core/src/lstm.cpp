#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "loadcast/error.hpp"
#include "loadcast/layers.hpp"

namespace loadcast::nn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatMap = Eigen::Map<const RowMajor>;
using MatMap = Eigen::Map<RowMajor>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Comparisons are written so NaN fails them too.
void check_gate_ranges(const double* f, const double* i, const double* o, const double* c_bar,
                       std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        const bool ok = f[j] >= 0.0 && f[j] <= 1.0 && i[j] >= 0.0 && i[j] <= 1.0 &&
                        o[j] >= 0.0 && o[j] <= 1.0 && c_bar[j] >= -1.0 && c_bar[j] <= 1.0;
        if (!ok) {
            throw errors::internal("lstm gate activation left its codomain; "
                                   "input or parameters are likely non-finite");
        }
    }
}

Tensor reverse_rows(const Tensor& m) {
    const std::size_t rows = m.dim(0);
    const std::size_t cols = m.dim(1);
    Tensor out({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double* src = m.data() + r * cols;
        std::copy(src, src + cols, out.data() + (rows - 1 - r) * cols);
    }
    return out;
}

}  // namespace

LstmParams lstm_zeros(std::size_t hidden, std::size_t input) {
    LstmParams p;
    p.w_f = Tensor({hidden, hidden + input});
    p.w_i = Tensor({hidden, hidden + input});
    p.w_c = Tensor({hidden, hidden + input});
    p.w_o = Tensor({hidden, hidden + input});
    p.b_f = Tensor({hidden});
    p.b_i = Tensor({hidden});
    p.b_c = Tensor({hidden});
    p.b_o = Tensor({hidden});
    return p;
}

LstmState lstm_initial_state(std::size_t hidden) {
    return {Tensor({hidden}), Tensor({hidden})};
}

LstmState lstm_cell_forward(const LstmParams& p, const Tensor& x, const LstmState& prev,
                            LstmCellCache* cache) {
    const std::size_t h = p.hidden_size();
    const std::size_t i = p.input_size();
    if (x.size() != i) {
        throw errors::shape("lstm input " + x.shape_str() + " does not match input size " +
                            std::to_string(i));
    }
    if (prev.h.size() != h || prev.c.size() != h) {
        throw errors::shape("lstm state does not match hidden size " + std::to_string(h));
    }

    Tensor hx({h + i});
    std::copy(prev.h.data(), prev.h.data() + h, hx.data());
    std::copy(x.data(), x.data() + i, hx.data() + h);

    const Tensor f = elementwise(matvec(p.w_f, hx) + p.b_f, Activation::sigmoid);
    const Tensor in = elementwise(matvec(p.w_i, hx) + p.b_i, Activation::sigmoid);
    const Tensor c_bar = elementwise(matvec(p.w_c, hx) + p.b_c, Activation::tanh);
    const Tensor o = elementwise(matvec(p.w_o, hx) + p.b_o, Activation::sigmoid);
    check_gate_ranges(f.data(), in.data(), o.data(), c_bar.data(), h);

    const Tensor c = hadamard(f, prev.c) + hadamard(in, c_bar);
    const Tensor tanh_c = elementwise(c, Activation::tanh);
    Tensor h_new = hadamard(o, tanh_c);

    if (cache != nullptr) {
        cache->x = x;
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->f = f;
        cache->i = in;
        cache->o = o;
        cache->c_bar = c_bar;
        cache->c = c;
        cache->tanh_c = tanh_c;
    }
    return {std::move(h_new), c};
}

LstmCellGrad lstm_cell_backward(const LstmParams& p, const LstmCellCache& cache,
                                const Tensor& dh, const Tensor& dc, LstmParams& grads) {
    const std::size_t h = p.hidden_size();
    const std::size_t i = p.input_size();

    Tensor dzf({h}), dzi({h}), dzc({h}), dzo({h}), dc_prev({h});
    for (std::size_t j = 0; j < h; ++j) {
        const double f = cache.f(j);
        const double in = cache.i(j);
        const double o = cache.o(j);
        const double cb = cache.c_bar(j);
        const double tc = cache.tanh_c(j);
        dzo(j) = dh(j) * tc * o * (1.0 - o);
        const double dct = dc(j) + dh(j) * o * (1.0 - tc * tc);
        dzf(j) = dct * cache.c_prev(j) * f * (1.0 - f);
        dzi(j) = dct * cb * in * (1.0 - in);
        dzc(j) = dct * in * (1.0 - cb * cb);
        dc_prev(j) = dct * f;
    }

    Tensor hx({h + i});
    std::copy(cache.h_prev.data(), cache.h_prev.data() + h, hx.data());
    std::copy(cache.x.data(), cache.x.data() + i, hx.data() + h);
    const ConstVecMap hx_v(hx.data(), static_cast<Eigen::Index>(h + i));

    Eigen::VectorXd dhx = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h + i));
    const Tensor* dzs[4] = {&dzf, &dzi, &dzc, &dzo};
    const Tensor* ws[4] = {&p.w_f, &p.w_i, &p.w_c, &p.w_o};
    Tensor* gws[4] = {&grads.w_f, &grads.w_i, &grads.w_c, &grads.w_o};
    Tensor* gbs[4] = {&grads.b_f, &grads.b_i, &grads.b_c, &grads.b_o};
    for (int g = 0; g < 4; ++g) {
        const ConstVecMap dz(dzs[g]->data(), static_cast<Eigen::Index>(h));
        MatMap gw(gws[g]->data(), static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h + i));
        gw.noalias() += dz * hx_v.transpose();
        VecMap(gbs[g]->data(), static_cast<Eigen::Index>(h)) += dz;
        const ConstMatMap w(ws[g]->data(), static_cast<Eigen::Index>(h),
                            static_cast<Eigen::Index>(h + i));
        dhx.noalias() += w.transpose() * dz;
    }

    LstmCellGrad out{Tensor({i}), Tensor({h}), std::move(dc_prev)};
    std::copy(dhx.data(), dhx.data() + h, out.dh_prev.data());
    std::copy(dhx.data() + h, dhx.data() + h + i, out.dx.data());
    return out;
}

Tensor lstm_sequence_forward(const LstmParams& p, const Tensor& x, LstmSequenceCache* cache) {
    const std::size_t hid = p.hidden_size();
    const std::size_t in = p.input_size();
    if (x.rank() != 2 || x.dim(1) != in) {
        throw errors::shape("lstm sequence input " + x.shape_str() +
                            " does not match input size " + std::to_string(in));
    }
    const std::size_t steps = x.dim(0);
    if (steps == 0) throw errors::input("lstm sequence input is empty");

    const auto eh = static_cast<Eigen::Index>(hid);
    const auto ei = static_cast<Eigen::Index>(in);
    const auto et = static_cast<Eigen::Index>(steps);
    const ConstMatMap xm(x.data(), et, ei);
    const ConstMatMap wf(p.w_f.data(), eh, eh + ei);
    const ConstMatMap wi(p.w_i.data(), eh, eh + ei);
    const ConstMatMap wc(p.w_c.data(), eh, eh + ei);
    const ConstMatMap wo(p.w_o.data(), eh, eh + ei);
    const ConstVecMap bf(p.b_f.data(), eh), bi(p.b_i.data(), eh);
    const ConstVecMap bc(p.b_c.data(), eh), bo(p.b_o.data(), eh);

    // Input projections for the whole sequence in one product per gate; the
    // per-step loop then only carries the (H x H) recurrent part.
    const RowMajor zxf = xm * wf.rightCols(ei).transpose();
    const RowMajor zxi = xm * wi.rightCols(ei).transpose();
    const RowMajor zxc = xm * wc.rightCols(ei).transpose();
    const RowMajor zxo = xm * wo.rightCols(ei).transpose();

    Tensor fs({steps, hid}), is({steps, hid}), os({steps, hid}), cbars({steps, hid});
    Tensor cs({steps, hid}), tcs({steps, hid}), hs({steps, hid});

    Eigen::VectorXd h = Eigen::VectorXd::Zero(eh);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(eh);
    Eigen::VectorXd zf(eh), zi(eh), zc(eh), zo(eh);
    for (std::size_t t = 0; t < steps; ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        zf.noalias() = wf.leftCols(eh) * h;
        zi.noalias() = wi.leftCols(eh) * h;
        zc.noalias() = wc.leftCols(eh) * h;
        zo.noalias() = wo.leftCols(eh) * h;
        zf += zxf.row(row).transpose() + bf;
        zi += zxi.row(row).transpose() + bi;
        zc += zxc.row(row).transpose() + bc;
        zo += zxo.row(row).transpose() + bo;

        double* f_row = fs.data() + t * hid;
        double* i_row = is.data() + t * hid;
        double* o_row = os.data() + t * hid;
        double* cb_row = cbars.data() + t * hid;
        double* c_row = cs.data() + t * hid;
        double* tc_row = tcs.data() + t * hid;
        double* h_row = hs.data() + t * hid;
        for (std::size_t j = 0; j < hid; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            f_row[j] = sigmoid(zf(jj));
            i_row[j] = sigmoid(zi(jj));
            o_row[j] = sigmoid(zo(jj));
            cb_row[j] = std::tanh(zc(jj));
            const double cj = f_row[j] * c(jj) + i_row[j] * cb_row[j];
            c_row[j] = cj;
            tc_row[j] = std::tanh(cj);
            h_row[j] = o_row[j] * tc_row[j];
            c(jj) = cj;
            h(jj) = h_row[j];
        }
        check_gate_ranges(f_row, i_row, o_row, cb_row, hid);
    }

    if (cache != nullptr) {
        cache->x = x;
        cache->f = std::move(fs);
        cache->i = std::move(is);
        cache->o = std::move(os);
        cache->c_bar = std::move(cbars);
        cache->c = std::move(cs);
        cache->tanh_c = std::move(tcs);
        cache->h = hs;
    }
    return hs;
}

Tensor lstm_sequence_backward(const LstmParams& p, const LstmSequenceCache& cache,
                              const Tensor& dh_seq, LstmParams& grads) {
    const std::size_t hid = p.hidden_size();
    const std::size_t in = p.input_size();
    const std::size_t steps = cache.x.dim(0);
    if (dh_seq.rank() != 2 || dh_seq.dim(0) != steps || dh_seq.dim(1) != hid) {
        throw errors::internal("lstm backward gradient " + dh_seq.shape_str() +
                               " does not match cached sequence");
    }

    const auto eh = static_cast<Eigen::Index>(hid);
    const auto ei = static_cast<Eigen::Index>(in);
    const auto et = static_cast<Eigen::Index>(steps);
    const ConstMatMap wf(p.w_f.data(), eh, eh + ei);
    const ConstMatMap wi(p.w_i.data(), eh, eh + ei);
    const ConstMatMap wc(p.w_c.data(), eh, eh + ei);
    const ConstMatMap wo(p.w_o.data(), eh, eh + ei);

    RowMajor dzf(et, eh), dzi(et, eh), dzc(et, eh), dzo(et, eh);
    Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(eh);
    std::vector<double> dc_carry(hid, 0.0);

    for (std::size_t t = steps; t-- > 0;) {
        const double* f_row = cache.f.data() + t * hid;
        const double* i_row = cache.i.data() + t * hid;
        const double* o_row = cache.o.data() + t * hid;
        const double* cb_row = cache.c_bar.data() + t * hid;
        const double* tc_row = cache.tanh_c.data() + t * hid;
        const double* cprev_row = t > 0 ? cache.c.data() + (t - 1) * hid : nullptr;
        const double* dh_row = dh_seq.data() + t * hid;
        const auto row = static_cast<Eigen::Index>(t);
        for (std::size_t j = 0; j < hid; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double dh = dh_row[j] + dh_carry(jj);
            const double o = o_row[j];
            const double tc = tc_row[j];
            dzo(row, jj) = dh * tc * o * (1.0 - o);
            const double dc = dc_carry[j] + dh * o * (1.0 - tc * tc);
            const double cprev = cprev_row != nullptr ? cprev_row[j] : 0.0;
            dzf(row, jj) = dc * cprev * f_row[j] * (1.0 - f_row[j]);
            dzi(row, jj) = dc * cb_row[j] * i_row[j] * (1.0 - i_row[j]);
            dzc(row, jj) = dc * i_row[j] * (1.0 - cb_row[j] * cb_row[j]);
            dc_carry[j] = dc * f_row[j];
        }
        dh_carry.noalias() = wf.leftCols(eh).transpose() * dzf.row(row).transpose();
        dh_carry.noalias() += wi.leftCols(eh).transpose() * dzi.row(row).transpose();
        dh_carry.noalias() += wc.leftCols(eh).transpose() * dzc.row(row).transpose();
        dh_carry.noalias() += wo.leftCols(eh).transpose() * dzo.row(row).transpose();
    }

    // h_prev rows: zero for t = 0, otherwise the hidden state one step back.
    RowMajor h_prev = RowMajor::Zero(et, eh);
    if (steps > 1) {
        h_prev.bottomRows(et - 1) = ConstMatMap(cache.h.data(), et, eh).topRows(et - 1);
    }
    const ConstMatMap xm(cache.x.data(), et, ei);

    const RowMajor* dzs[4] = {&dzf, &dzi, &dzc, &dzo};
    Tensor* gws[4] = {&grads.w_f, &grads.w_i, &grads.w_c, &grads.w_o};
    Tensor* gbs[4] = {&grads.b_f, &grads.b_i, &grads.b_c, &grads.b_o};
    for (int g = 0; g < 4; ++g) {
        MatMap gw(gws[g]->data(), eh, eh + ei);
        gw.leftCols(eh).noalias() += dzs[g]->transpose() * h_prev;
        gw.rightCols(ei).noalias() += dzs[g]->transpose() * xm;
        VecMap(gbs[g]->data(), eh) += dzs[g]->colwise().sum().transpose();
    }

    Tensor dx({steps, in});
    MatMap dxm(dx.data(), et, ei);
    dxm.noalias() = dzf * wf.rightCols(ei);
    dxm.noalias() += dzi * wi.rightCols(ei);
    dxm.noalias() += dzc * wc.rightCols(ei);
    dxm.noalias() += dzo * wo.rightCols(ei);
    return dx;
}

BilstmParams bilstm_zeros(std::size_t hidden, std::size_t input) {
    return {lstm_zeros(hidden, input), lstm_zeros(hidden, input)};
}

Tensor bilstm_forward(const BilstmParams& p, const Tensor& x, BilstmCache* cache) {
    const Tensor hf = lstm_sequence_forward(p.fwd, x, cache != nullptr ? &cache->fwd : nullptr);
    const Tensor hb =
        reverse_rows(lstm_sequence_forward(p.bwd, reverse_rows(x),
                                           cache != nullptr ? &cache->bwd : nullptr));
    const std::size_t steps = x.dim(0);
    const std::size_t hid = p.hidden_size();
    Tensor out({steps, 2 * hid});
    for (std::size_t t = 0; t < steps; ++t) {
        std::copy(hf.data() + t * hid, hf.data() + (t + 1) * hid, out.data() + t * 2 * hid);
        std::copy(hb.data() + t * hid, hb.data() + (t + 1) * hid, out.data() + t * 2 * hid + hid);
    }
    return out;
}

Tensor bilstm_backward(const BilstmParams& p, const BilstmCache& cache, const Tensor& dy,
                       BilstmParams& grads) {
    const std::size_t steps = dy.dim(0);
    const std::size_t hid = p.hidden_size();
    Tensor dhf({steps, hid}), dhb({steps, hid});
    for (std::size_t t = 0; t < steps; ++t) {
        std::copy(dy.data() + t * 2 * hid, dy.data() + t * 2 * hid + hid, dhf.data() + t * hid);
        std::copy(dy.data() + t * 2 * hid + hid, dy.data() + (t + 1) * 2 * hid,
                  dhb.data() + t * hid);
    }
    Tensor dx = lstm_sequence_backward(p.fwd, cache.fwd, dhf, grads.fwd);
    Tensor dxb = reverse_rows(lstm_sequence_backward(p.bwd, cache.bwd, reverse_rows(dhb),
                                                     grads.bwd));
    add_in_place(dx, dxb);
    return dx;
}

}  // namespace loadcast::nn
