#include "der/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace der {

Mlp::Mlp(std::vector<int> widths, OutputActivation out_act)
    : widths_(std::move(widths)), out_act_(out_act) {
    if (widths_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output widths");
    for (int w : widths_)
        if (w < 1) throw std::invalid_argument("Mlp: widths must be positive");
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        w_.emplace_back(static_cast<std::size_t>(widths_[l]) * widths_[l + 1], 0.0);
        b_.emplace_back(widths_[l + 1], 0.0);
    }
}

void Mlp::init(std::mt19937_64& rng) {
    for (std::size_t l = 0; l < w_.size(); ++l) {
        double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : w_[l]) v = dist(rng);
        for (double& v : b_[l]) v = dist(rng);
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) n += w_[l].size() + b_[l].size();
    return n;
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
    MlpCache c = forward_batch(input, 1);
    return c.act.back();
}

MlpCache Mlp::forward_batch(const std::vector<double>& input, int batch) const {
    if (static_cast<int>(input.size()) != batch * widths_.front())
        throw std::invalid_argument("Mlp forward: input shape mismatch");
    MlpCache c;
    c.batch = batch;
    c.act.resize(w_.size() + 1);
    c.pre.resize(w_.size());
    c.act[0] = input;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        const int in = widths_[l], out = widths_[l + 1];
        std::vector<double>& z = c.pre[l];
        z.assign(static_cast<std::size_t>(batch) * out, 0.0);
        const std::vector<double>& h = c.act[l];
        const std::vector<double>& W = w_[l];
        for (int bi = 0; bi < batch; ++bi) {
            double* zrow = z.data() + static_cast<std::size_t>(bi) * out;
            const double* hrow = h.data() + static_cast<std::size_t>(bi) * in;
            for (int j = 0; j < out; ++j) zrow[j] = b_[l][j];
            for (int i = 0; i < in; ++i) {
                const double hv = hrow[i];
                const double* wrow = W.data() + static_cast<std::size_t>(i) * out;
                for (int j = 0; j < out; ++j) zrow[j] += hv * wrow[j];
            }
        }
        std::vector<double>& a = c.act[l + 1];
        a = z;
        const bool last = (l + 1 == w_.size());
        if (!last) {
            for (double& v : a) v = v > 0.0 ? v : 0.0;
        } else if (out_act_ == OutputActivation::Tanh) {
            for (double& v : a) v = std::tanh(v);
        }
    }
    return c;
}

MlpGradients Mlp::backward_batch(const MlpCache& cache, const std::vector<double>& upstream) const {
    const int batch = cache.batch;
    if (static_cast<int>(upstream.size()) != batch * widths_.back())
        throw std::invalid_argument("Mlp backward: upstream shape mismatch");
    MlpGradients g;
    g.dw.resize(w_.size());
    g.db.resize(w_.size());
    std::vector<double> delta = upstream;  // gradient w.r.t. current layer pre-activation
    // output activation
    if (out_act_ == OutputActivation::Tanh) {
        const std::vector<double>& y = cache.act.back();
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= (1.0 - y[i] * y[i]);
    }
    for (std::size_t li = w_.size(); li-- > 0;) {
        const int in = widths_[li], out = widths_[li + 1];
        g.dw[li].assign(w_[li].size(), 0.0);
        g.db[li].assign(b_[li].size(), 0.0);
        const std::vector<double>& h = cache.act[li];
        for (int bi = 0; bi < batch; ++bi) {
            const double* drow = delta.data() + static_cast<std::size_t>(bi) * out;
            const double* hrow = h.data() + static_cast<std::size_t>(bi) * in;
            for (int j = 0; j < out; ++j) g.db[li][j] += drow[j];
            for (int i = 0; i < in; ++i) {
                const double hv = hrow[i];
                if (hv == 0.0) continue;
                double* gw = g.dw[li].data() + static_cast<std::size_t>(i) * out;
                for (int j = 0; j < out; ++j) gw[j] += hv * drow[j];
            }
        }
        // propagate to previous layer
        std::vector<double> prev(static_cast<std::size_t>(batch) * in, 0.0);
        const std::vector<double>& W = w_[li];
        for (int bi = 0; bi < batch; ++bi) {
            const double* drow = delta.data() + static_cast<std::size_t>(bi) * out;
            double* prow = prev.data() + static_cast<std::size_t>(bi) * in;
            for (int i = 0; i < in; ++i) {
                const double* wrow = W.data() + static_cast<std::size_t>(i) * out;
                double s = 0.0;
                for (int j = 0; j < out; ++j) s += wrow[j] * drow[j];
                prow[i] = s;
            }
        }
        if (li > 0) {
            // relu mask of the previous layer's pre-activation
            const std::vector<double>& z = cache.pre[li - 1];
            for (std::size_t i = 0; i < prev.size(); ++i)
                if (z[i] <= 0.0) prev[i] = 0.0;
        }
        delta = std::move(prev);
    }
    g.dinput = std::move(delta);
    return g;
}

std::vector<double> MlpGradients::flatten() const {
    std::vector<double> flat;
    std::size_t n = 0;
    for (std::size_t l = 0; l < dw.size(); ++l) n += dw[l].size() + db[l].size();
    flat.reserve(n);
    for (std::size_t l = 0; l < dw.size(); ++l) {
        flat.insert(flat.end(), dw[l].begin(), dw[l].end());
        flat.insert(flat.end(), db[l].begin(), db[l].end());
    }
    return flat;
}

ModelParameters Mlp::flatten() const {
    ModelParameters p;
    p.widths = widths_;
    p.output_activation = out_act_;
    p.values = flat_values();
    return p;
}

std::vector<double> Mlp::flat_values() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < w_.size(); ++l) {
        flat.insert(flat.end(), w_[l].begin(), w_[l].end());
        flat.insert(flat.end(), b_[l].begin(), b_[l].end());
    }
    return flat;
}

void Mlp::set_parameters(const ModelParameters& p) {
    if (p.widths != widths_ || p.output_activation != out_act_)
        throw std::invalid_argument("Mlp: parameter manifest mismatch");
    set_flat(p.values);
}

void Mlp::set_flat(const std::vector<double>& flat) {
    if (flat.size() != parameter_count())
        throw std::invalid_argument("Mlp: flat parameter size mismatch");
    std::size_t off = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        std::copy(flat.begin() + off, flat.begin() + off + w_[l].size(), w_[l].begin());
        off += w_[l].size();
        std::copy(flat.begin() + off, flat.begin() + off + b_[l].size(), b_[l].begin());
        off += b_[l].size();
    }
}

void hard_update(ModelParameters& target, const ModelParameters& online) {
    if (!target.same_shape(online)) throw std::invalid_argument("hard_update: manifest mismatch");
    target.values = online.values;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    for (double g : grads) {
        if (!std::isfinite(g)) {
            ++state.skipped_steps;
            return;
        }
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

void save_parameters(const ModelParameters& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << "mlp";
    for (int w : p.widths) out << ' ' << w;
    out << '\n';
    out << (p.output_activation == OutputActivation::Tanh ? "tanh" : "identity") << '\n';
    char buf[40];
    for (double v : p.values) {
        std::snprintf(buf, sizeof(buf), "%a", v);
        out << buf << '\n';
    }
}

ModelParameters load_parameters(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "mlp") throw std::runtime_error("bad checkpoint header: " + path);
    ModelParameters p;
    int w;
    while (hs >> w) p.widths.push_back(w);
    std::string act;
    std::getline(in, act);
    if (act == "tanh")
        p.output_activation = OutputActivation::Tanh;
    else if (act == "identity")
        p.output_activation = OutputActivation::Identity;
    else
        throw std::runtime_error("bad activation tag: " + act);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        p.values.push_back(std::strtod(line.c_str(), nullptr));
    }
    std::size_t expect = 0;
    for (std::size_t l = 0; l + 1 < p.widths.size(); ++l)
        expect += static_cast<std::size_t>(p.widths[l]) * p.widths[l + 1] + p.widths[l + 1];
    if (p.values.size() != expect) throw std::runtime_error("checkpoint value count mismatch: " + path);
    return p;
}

}  // namespace der
