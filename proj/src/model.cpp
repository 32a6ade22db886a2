#include "ksr/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "ksr/errors.hpp"

namespace ksr {

namespace {

constexpr double kProbFloor = 1e-12;

void validate_config(const ModelConfig& c) {
    if (c.n < 1) throw ConfigError("feature count n must be >= 1");
    if (c.d < 2) throw ConfigError("category count d must be >= 2");
    if (!(c.sigma > 0.0)) throw ConfigError("sigma must be positive");
}

double log_sum_exp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

// Per-feature forward pass shared by score and gradient.
struct FeatureState {
    std::vector<double> a, b, u, v;    // softmax rows: head, rel-subj, tail, rel-obj
    std::vector<double> pt, qt;        // unnormalized products a*b, u*v
    std::vector<double> p, q;          // normalized messages
    std::vector<double> w;             // Laplace coupling on the diagonal
    double sum_p = 0.0, sum_q = 0.0;
    double T = 0.0;                    // inner sum  sum_c w_c pt_c qt_c
    double logT = 0.0;                 // log-space evaluation of the same sum

    void resize(int d) {
        for (auto* vec : {&a, &b, &u, &v, &pt, &qt, &p, &q, &w})
            vec->assign(static_cast<std::size_t>(d), 0.0);
    }

    void compute(const KsrModel& m, const Triple& t, int k) {
        int d = m.config().d;
        resize(d);
        softmax(m.entity_row(t.head, k), a);
        softmax(m.rel_subj_row(t.relation, k), b);
        softmax(m.entity_row(t.tail, k), u);
        softmax(m.rel_obj_row(t.relation, k), v);
        sum_p = sum_q = 0.0;
        for (int c = 0; c < d; ++c) {
            pt[c] = a[c] * b[c];
            qt[c] = u[c] * v[c];
            sum_p += pt[c];
            sum_q += qt[c];
        }
        double sigma = m.config().sigma;
        T = 0.0;
        std::vector<double> log_terms(d);
        for (int c = 0; c < d; ++c) {
            p[c] = pt[c] / sum_p;
            q[c] = qt[c] / sum_q;
            w[c] = std::exp(-std::abs(p[c] - q[c]) / sigma);
            T += w[c] * pt[c] * qt[c];
            log_terms[c] = -std::abs(p[c] - q[c]) / sigma +
                           std::log(std::max(pt[c], kProbFloor)) +
                           std::log(std::max(qt[c], kProbFloor));
        }
        logT = log_sum_exp(log_terms);
    }
};

std::vector<double>& touched_row(std::unordered_map<int, std::vector<double>>& table, int idx,
                                 std::size_t len) {
    auto& row = table[idx];
    if (row.empty()) row.assign(len, 0.0);
    return row;
}

// grad_logit_e = x_e * (grad_x_e - <x, grad_x>)
void backprop_softmax(std::span<const double> x, std::span<const double> grad_x,
                      double* grad_logits) {
    double dot = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) dot += x[c] * grad_x[c];
    for (std::size_t c = 0; c < x.size(); ++c) grad_logits[c] += x[c] * (grad_x[c] - dot);
}

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

KsrModel::KsrModel(ModelConfig config, int num_entities, int num_relations)
    : config_(config), num_entities_(num_entities), num_relations_(num_relations) {
    validate_config(config_);
    if (num_entities < 1 || num_relations < 1)
        throw ConfigError("entity and relation counts must be >= 1");
    std::size_t nd = static_cast<std::size_t>(config_.n) * config_.d;
    entity_logits_.assign(static_cast<std::size_t>(num_entities) * nd, 0.0);
    rel_subj_logits_.assign(static_cast<std::size_t>(num_relations) * nd, 0.0);
    rel_obj_logits_.assign(static_cast<std::size_t>(num_relations) * nd, 0.0);
    rel_feat_logits_.assign(static_cast<std::size_t>(num_relations) * config_.n, 0.0);
}

KsrModel init_model(const ModelConfig& config, int num_entities, int num_relations,
                    std::mt19937_64& rng) {
    KsrModel m(config, num_entities, num_relations);
    std::uniform_real_distribution<double> init(-0.1, 0.1);
    for (auto* table : {&m.entity_logits(), &m.rel_subj_logits(), &m.rel_obj_logits(),
                        &m.rel_feat_logits()})
        for (auto& x : *table) x = init(rng);
    return m;
}

void softmax(std::span<const double> logits, std::span<double> out) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : logits) mx = std::max(mx, x);
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out[c] = std::exp(logits[c] - mx);
        sum += out[c];
    }
    for (auto& x : out) x /= sum;
}

std::vector<double> subject_message(const KsrModel& m, int head, int relation, int k) {
    int d = m.config().d;
    std::vector<double> a(d), b(d), msg(d);
    softmax(m.entity_row(head, k), a);
    softmax(m.rel_subj_row(relation, k), b);
    double sum = 0.0;
    for (int c = 0; c < d; ++c) sum += (msg[c] = a[c] * b[c]);
    for (auto& x : msg) x /= sum;
    return msg;
}

std::vector<double> object_message(const KsrModel& m, int tail, int relation, int k) {
    int d = m.config().d;
    std::vector<double> u(d), v(d), msg(d);
    softmax(m.entity_row(tail, k), u);
    softmax(m.rel_obj_row(relation, k), v);
    double sum = 0.0;
    for (int c = 0; c < d; ++c) sum += (msg[c] = u[c] * v[c]);
    for (auto& x : msg) x /= sum;
    return msg;
}

std::vector<double> coupling_weights(std::span<const double> p, std::span<const double> q,
                                     double sigma) {
    std::vector<double> w(p.size());
    for (std::size_t c = 0; c < p.size(); ++c)
        w[c] = std::exp(-std::abs(p[c] - q[c]) / sigma);
    return w;
}

double score(const KsrModel& m, const Triple& t) {
    int n = m.config().n;
    std::vector<double> phi(n);
    softmax(m.rel_feat_row(t.relation), phi);
    FeatureState st;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        st.compute(m, t, k);
        s += phi[k] * st.logT;
    }
    if (!std::isfinite(s))
        throw NumericalError("non-finite score for triple (" + std::to_string(t.head) + "," +
                             std::to_string(t.relation) + "," + std::to_string(t.tail) + ")");
    return s;
}

void accumulate_score_gradient(const KsrModel& m, const Triple& t, double scale,
                               SparseGradient& grad) {
    int n = m.config().n;
    int d = m.config().d;
    double sigma = m.config().sigma;
    std::size_t nd = static_cast<std::size_t>(n) * d;

    std::vector<double> phi(n);
    softmax(m.rel_feat_row(t.relation), phi);

    auto& g_head = touched_row(grad.entity, t.head, nd);
    auto& g_tail = touched_row(grad.entity, t.tail, nd);
    auto& g_subj = touched_row(grad.rel_subj, t.relation, nd);
    auto& g_obj = touched_row(grad.rel_obj, t.relation, nd);
    auto& g_feat = touched_row(grad.rel_feat, t.relation, static_cast<std::size_t>(n));

    std::vector<double> logT(n);
    std::vector<double> da(d), db(d), du(d), dv(d);
    FeatureState st;
    for (int k = 0; k < n; ++k) {
        st.compute(m, t, k);
        logT[k] = st.logT;

        double Teff = std::max(st.T, kProbFloor);
        double coef = (st.T > kProbFloor) ? scale * phi[k] / Teff : 0.0;

        // dT via the coupling weights: g_c for the head-side message,
        // h_c for the tail-side one
        double Gp = 0.0, Gq = 0.0;
        std::vector<double> gw(d), hw(d);
        for (int c = 0; c < d; ++c) {
            double base = st.pt[c] * st.qt[c] * st.w[c] / sigma;
            double s = sgn(st.p[c] - st.q[c]);
            gw[c] = -s * base;
            hw[c] = s * base;
            Gp += gw[c] * st.p[c];
            Gq += hw[c] * st.q[c];
        }
        for (int c = 0; c < d; ++c) {
            double direct_p = st.w[c] * st.qt[c];
            double via_p = (gw[c] - Gp) / st.sum_p;
            da[c] = coef * (direct_p * st.b[c] + via_p * st.b[c]);
            db[c] = coef * (direct_p * st.a[c] + via_p * st.a[c]);
            double direct_q = st.w[c] * st.pt[c];
            double via_q = (hw[c] - Gq) / st.sum_q;
            du[c] = coef * (direct_q * st.v[c] + via_q * st.v[c]);
            dv[c] = coef * (direct_q * st.u[c] + via_q * st.u[c]);
        }
        backprop_softmax(st.a, da, g_head.data() + static_cast<std::size_t>(k) * d);
        backprop_softmax(st.b, db, g_subj.data() + static_cast<std::size_t>(k) * d);
        backprop_softmax(st.u, du, g_tail.data() + static_cast<std::size_t>(k) * d);
        backprop_softmax(st.v, dv, g_obj.data() + static_cast<std::size_t>(k) * d);
    }

    double mean = 0.0;
    for (int k = 0; k < n; ++k) mean += phi[k] * logT[k];
    for (int k = 0; k < n; ++k) g_feat[k] += scale * phi[k] * (logT[k] - mean);
}

GradientResult score_gradient(const KsrModel& m, const Triple& pos, const Triple& neg,
                              double gamma) {
    GradientResult res;
    res.score_pos = score(m, pos);
    res.score_neg = score(m, neg);
    res.loss = std::max(0.0, gamma - res.score_pos + res.score_neg);
    if (res.loss <= 0.0) return res;
    // d/dtheta [gamma - s_pos + s_neg]
    accumulate_score_gradient(m, pos, -1.0, res.grad);
    accumulate_score_gradient(m, neg, +1.0, res.grad);
    return res;
}

SemanticCode infer_entity_code(const KsrModel& m, int entity) {
    int n = m.config().n;
    int d = m.config().d;
    SemanticCode code;
    code.categories.resize(n);
    std::vector<double> probs(d);
    for (int k = 0; k < n; ++k) {
        softmax(m.entity_row(entity, k), probs);
        int best = 0;
        for (int c = 1; c < d; ++c)
            if (probs[c] > probs[best]) best = c;
        code.categories[k] = best;
    }
    return code;
}

SemanticCode infer_relation_code(const KsrModel& m, int relation) {
    int n = m.config().n;
    int d = m.config().d;
    SemanticCode code;
    code.categories.resize(n);
    std::vector<double> subj(d), obj(d);
    for (int k = 0; k < n; ++k) {
        softmax(m.rel_subj_row(relation, k), subj);
        softmax(m.rel_obj_row(relation, k), obj);
        int best = 0;
        for (int c = 1; c < d; ++c)
            if (subj[c] * obj[c] > subj[best] * obj[best]) best = c;
        code.categories[k] = best;
    }
    return code;
}

namespace {

constexpr char kMagic[4] = {'K', 'S', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v, const char* what) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
        throw IoError(std::string("truncated model file while reading ") + what);
}

void write_table(std::ofstream& out, const std::vector<double>& table) {
    write_pod(out, static_cast<std::uint64_t>(table.size()));
    out.write(reinterpret_cast<const char*>(table.data()),
              static_cast<std::streamsize>(table.size() * sizeof(double)));
}

void read_table(std::ifstream& in, std::vector<double>& table, std::size_t expected,
                const char* name) {
    std::uint64_t len = 0;
    read_pod(in, len, name);
    if (len != expected)
        throw IoError(std::string("dimension mismatch for table ") + name + ": header says " +
                      std::to_string(len) + " values, config implies " +
                      std::to_string(expected));
    table.resize(expected);
    std::streamsize bytes = static_cast<std::streamsize>(expected * sizeof(double));
    in.read(reinterpret_cast<char*>(table.data()), bytes);
    if (in.gcount() != bytes)
        throw IoError(std::string("truncated model file in table ") + name + ": expected " +
                      std::to_string(bytes) + " bytes, got " + std::to_string(in.gcount()));
}

}  // namespace

void save_model(const KsrModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::int32_t>(m.config().n));
    write_pod(out, static_cast<std::int32_t>(m.config().d));
    write_pod(out, m.config().sigma);
    write_pod(out, m.config().seed);
    write_pod(out, static_cast<std::int32_t>(m.num_entities()));
    write_pod(out, static_cast<std::int32_t>(m.num_relations()));
    write_table(out, m.entity_logits());
    write_table(out, m.rel_subj_logits());
    write_table(out, m.rel_obj_logits());
    write_table(out, m.rel_feat_logits());
    if (!out) throw IoError("write failed for model file: " + path);

    std::ofstream meta(path + ".meta");
    meta << "format=KSR1\n"
         << "n=" << m.config().n << "\n"
         << "d=" << m.config().d << "\n"
         << "sigma=" << m.config().sigma << "\n"
         << "seed=" << m.config().seed << "\n"
         << "entities=" << m.num_entities() << "\n"
         << "relations=" << m.num_relations() << "\n"
         << "parameters=" << m.parameter_count() << "\n";
}

KsrModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("bad magic in model file: " + path);
    std::uint32_t version = 0;
    read_pod(in, version, "version");
    if (version != kVersion)
        throw IoError("unsupported model file version " + std::to_string(version));

    ModelConfig config;
    std::int32_t n = 0, d = 0, E = 0, R = 0;
    read_pod(in, n, "n");
    read_pod(in, d, "d");
    read_pod(in, config.sigma, "sigma");
    read_pod(in, config.seed, "seed");
    read_pod(in, E, "entity count");
    read_pod(in, R, "relation count");
    config.n = n;
    config.d = d;

    KsrModel m(config, E, R);
    std::size_t nd = static_cast<std::size_t>(n) * d;
    read_table(in, m.entity_logits(), static_cast<std::size_t>(E) * nd, "entity");
    read_table(in, m.rel_subj_logits(), static_cast<std::size_t>(R) * nd, "rel_subj");
    read_table(in, m.rel_obj_logits(), static_cast<std::size_t>(R) * nd, "rel_obj");
    read_table(in, m.rel_feat_logits(), static_cast<std::size_t>(R) * n, "rel_feat");
    return m;
}

}  // namespace ksr
