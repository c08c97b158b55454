#include "geostop/process.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace geostop {

namespace {

constexpr double kMassTol = 1e-12;

std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
    return out;
}

// Row-major S x S multiply.
std::vector<double> mat_mul(const std::vector<double>& a, const std::vector<double>& b,
                            std::size_t s) {
    std::vector<double> c(s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < s; ++k) {
            const double aik = a[i * s + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < s; ++j) c[i * s + j] += aik * b[k * s + j];
        }
    return c;
}

std::vector<double> mat_pow(std::vector<double> base, std::int64_t n, std::size_t s) {
    std::vector<double> acc(s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i) acc[i * s + i] = 1.0;
    while (n > 0) {
        if (n & 1) acc = mat_mul(acc, base, s);
        base = mat_mul(base, base, s);
        n >>= 1;
    }
    return acc;
}

// Stationary law of an irreducible aperiodic chain.
std::vector<double> solve_stationary(const std::vector<std::vector<double>>& rows) {
    const std::size_t s = rows.size();
    if (s <= 64) {
        // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
        std::vector<double> a(s * s), b(s, 0.0);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                a[i * s + j] = rows[j][i] - (i == j ? 1.0 : 0.0);
        for (std::size_t j = 0; j < s; ++j) a[(s - 1) * s + j] = 1.0;
        b[s - 1] = 1.0;
        // Gaussian elimination with partial pivoting.
        std::vector<std::size_t> perm(s);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t col = 0; col < s; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < s; ++r)
                if (std::fabs(a[perm[r] * s + col]) > std::fabs(a[perm[piv] * s + col])) piv = r;
            std::swap(perm[col], perm[piv]);
            const double d = a[perm[col] * s + col];
            if (std::fabs(d) < 1e-300)
                throw std::invalid_argument("markov model: singular stationary system");
            for (std::size_t r = col + 1; r < s; ++r) {
                const double f = a[perm[r] * s + col] / d;
                if (f == 0.0) continue;
                for (std::size_t j = col; j < s; ++j) a[perm[r] * s + j] -= f * a[perm[col] * s + j];
                b[perm[r]] -= f * b[perm[col]];
            }
        }
        std::vector<double> pi(s, 0.0);
        for (std::size_t col = s; col-- > 0;) {
            double v = b[perm[col]];
            for (std::size_t j = col + 1; j < s; ++j) v -= a[perm[col] * s + j] * pi[j];
            pi[col] = v / a[perm[col] * s + col];
        }
        return pi;
    }
    // power iteration
    std::vector<double> pi(s, 1.0 / static_cast<double>(s)), next(s);
    for (int iter = 0; iter < 1000000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < s; ++i) {
            const double w = pi[i];
            if (w == 0.0) continue;
            for (std::size_t j = 0; j < s; ++j) next[j] += w * rows[i][j];
        }
        double diff = 0.0, total = 0.0;
        for (std::size_t j = 0; j < s; ++j) total += next[j];
        for (std::size_t j = 0; j < s; ++j) {
            next[j] /= total;
            diff = std::max(diff, std::fabs(next[j] - pi[j]));
        }
        pi.swap(next);
        if (diff < 1e-14) return pi;
    }
    throw std::runtime_error("markov model: power iteration did not converge to 1e-14");
}

void check_irreducible_aperiodic(const std::vector<std::vector<double>>& rows) {
    const std::size_t s = rows.size();
    // forward and backward reachability from state 0
    const auto reach = [&](bool forward) {
        std::vector<char> seen(s, 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v = 0; v < s; ++v) {
                const double p = forward ? rows[u][v] : rows[v][u];
                if (p > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
            }
        }
        return seen;
    };
    const auto fwd = reach(true), bwd = reach(false);
    for (std::size_t i = 0; i < s; ++i)
        if (!fwd[i] || !bwd[i])
            throw std::invalid_argument("markov model: chain is not irreducible");

    // period = gcd over edges (u,v) of level(u) + 1 - level(v), via BFS levels
    std::vector<std::int64_t> level(s, -1);
    std::queue<std::size_t> q;
    q.push(0);
    level[0] = 0;
    std::int64_t g = 0;
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t v = 0; v < s; ++v) {
            if (rows[u][v] <= 0.0) continue;
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    if (g != 1) throw std::invalid_argument("markov model: chain is periodic (period " +
                                            std::to_string(g) + ")");
}

std::vector<double> cdf_of(const std::vector<double>& w) {
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;  // guard against roundoff at the top
    return cdf;
}

}  // namespace

ProcessModel ProcessModel::iid(std::vector<double> weights, std::vector<std::string> names) {
    if (weights.empty()) throw std::invalid_argument("iid model: empty weight vector");
    double total = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("iid model: negative weight");
        total += w;
    }
    if (std::fabs(total - 1.0) > kMassTol)
        throw std::invalid_argument("iid model: weights sum to " + std::to_string(total) +
                                    ", not 1 within 1e-12");
    ProcessModel m;
    m.variant_ = Variant::iid;
    m.stationary_ = std::move(weights);
    m.names_ = names.empty() ? default_names(m.stationary_.size()) : std::move(names);
    if (m.names_.size() != m.stationary_.size())
        throw std::invalid_argument("iid model: name/weight count mismatch");
    m.finalize();
    return m;
}

ProcessModel ProcessModel::markov(std::vector<std::vector<double>> rows,
                                  std::vector<std::string> names) {
    const std::size_t s = rows.size();
    if (s == 0) throw std::invalid_argument("markov model: empty transition matrix");
    for (const auto& row : rows) {
        if (row.size() != s) throw std::invalid_argument("markov model: matrix is not square");
        double total = 0.0;
        for (const double p : row) {
            if (!(p >= 0.0)) throw std::invalid_argument("markov model: negative transition");
            total += p;
        }
        if (std::fabs(total - 1.0) > kMassTol)
            throw std::invalid_argument("markov model: row sums to " + std::to_string(total) +
                                        ", not 1 within 1e-12");
    }
    check_irreducible_aperiodic(rows);

    ProcessModel m;
    m.variant_ = Variant::markov;
    m.rows_ = std::move(rows);
    m.stationary_ = solve_stationary(m.rows_);
    m.names_ = names.empty() ? default_names(s) : std::move(names);
    if (m.names_.size() != s)
        throw std::invalid_argument("markov model: name/state count mismatch");

    // pi P == pi within 1e-12
    for (std::size_t j = 0; j < s; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < s; ++i) v += m.stationary_[i] * m.rows_[i][j];
        if (std::fabs(v - m.stationary_[j]) > kMassTol)
            throw std::runtime_error("markov model: stationary solve residual above 1e-12");
    }
    m.finalize();
    return m;
}

void ProcessModel::finalize() {
    stationary_cdf_ = cdf_of(stationary_);
    if (variant_ == Variant::markov) {
        row_cdfs_.reserve(rows_.size());
        for (const auto& row : rows_) row_cdfs_.push_back(cdf_of(row));
    }
    uniform_ = variant_ == Variant::iid &&
               std::all_of(stationary_.begin(), stationary_.end(),
                           [&](double w) { return w == stationary_[0]; });
}

Symbol ProcessModel::symbol_id(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw std::invalid_argument("unknown symbol: " + name);
}

double ProcessModel::transition(Symbol from, Symbol to) const {
    if (variant_ == Variant::iid) return stationary_.at(to);
    return rows_.at(from).at(to);
}

Symbol ProcessModel::sample_from_cdf(const std::vector<double>& cdf, PhiloxStream& rng) const {
    const double u = rng.next_double();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<Symbol>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
}

Symbol ProcessModel::sample_initial(PhiloxStream& rng) const {
    if (uniform_) return rng.next_below(stationary_.size());
    return sample_from_cdf(stationary_cdf_, rng);
}

Symbol ProcessModel::sample_next(Symbol prev, PhiloxStream& rng) const {
    if (variant_ == Variant::iid) return sample_initial(rng);
    return sample_from_cdf(row_cdfs_[prev], rng);
}

std::vector<Symbol> ProcessModel::sample_path(std::size_t length, PhiloxStream& rng) const {
    if (length == 0) throw std::invalid_argument("sample_path: length must be >= 1");
    std::vector<Symbol> path(length);
    path[0] = sample_initial(rng);
    for (std::size_t i = 1; i < length; ++i) path[i] = sample_next(path[i - 1], rng);
    return path;
}

double ProcessModel::marginal_prob(std::span<const Symbol> subset) const {
    std::vector<char> seen(alphabet_size(), 0);
    double total = 0.0;
    for (const Symbol s : subset) {
        if (s >= alphabet_size()) throw std::invalid_argument("marginal_prob: unknown symbol id");
        if (seen[s]) continue;
        seen[s] = 1;
        total += stationary_[s];
    }
    return total;
}

double ProcessModel::cylinder_prob(std::span<const Symbol> word) const {
    if (word.empty()) throw std::invalid_argument("cylinder_prob: empty word");
    for (const Symbol s : word)
        if (s >= alphabet_size()) throw std::invalid_argument("cylinder_prob: unknown symbol id");
    double p = stationary_[word[0]];
    for (std::size_t i = 1; i < word.size(); ++i) p *= transition(word[i - 1], word[i]);
    return p;
}

double psi_coefficient(const ProcessModel& model, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("psi_coefficient: n must be >= 1");
    if (model.variant() == ProcessModel::Variant::iid) return 0.0;
    const std::size_t s = model.alphabet_size();
    std::vector<double> p(s * s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) p[i * s + j] = model.transition(i, j);
    const auto pn = mat_pow(std::move(p), n, s);
    double best = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        if (model.stationary()[i] == 0.0) continue;
        for (std::size_t j = 0; j < s; ++j) {
            const double pj = model.stationary()[j];
            if (pj == 0.0) continue;
            best = std::max(best, std::fabs(pn[i * s + j] / pj - 1.0));
        }
    }
    return best;
}

double upsilon_rate(const ProcessModel& model, int validation_len) {
    if (validation_len < 1) throw std::invalid_argument("upsilon_rate: validation_len >= 1");
    const std::size_t s = model.alphabet_size();
    double worst = 0.0;
    for (const double w : model.stationary()) worst = std::max(worst, w);
    if (model.variant() == ProcessModel::Variant::markov)
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                if (model.stationary()[i] > 0.0)
                    worst = std::max(worst, model.transition(i, j));
    if (worst >= 1.0)
        throw std::invalid_argument(
            "upsilon_rate: some symbol or transition has full mass; cylinders do not decay");
    const double upsilon = -std::log(worst);

    // exhaustive check of every positive cylinder up to validation_len
    double combos = 1.0;
    for (int i = 0; i < validation_len; ++i) combos *= static_cast<double>(s);
    if (combos > 8e6)
        throw std::invalid_argument("upsilon_rate: validation space too large; lower validation_len");
    std::vector<Symbol> word;
    const std::function<void(double)> dfs = [&](double prob) {
        if (!word.empty()) {
            const double cap = std::exp(-upsilon * static_cast<double>(word.size()));
            if (prob > cap * (1.0 + 1e-9))
                throw std::runtime_error("upsilon_rate: cylinder above exp(-upsilon*n)");
            if (word.size() == static_cast<std::size_t>(validation_len)) return;
        }
        for (Symbol c = 0; c < s; ++c) {
            const double step =
                word.empty() ? model.stationary()[c] : model.transition(word.back(), c);
            if (step <= 0.0) continue;
            word.push_back(c);
            dfs(prob * step);
            word.pop_back();
        }
    };
    dfs(1.0);
    return upsilon;
}

MixingProfile MixingProfile::zero() { return MixingProfile(); }

MixingProfile MixingProfile::from_model(const ProcessModel& model) {
    if (model.variant() == ProcessModel::Variant::iid) return zero();
    MixingProfile p;
    p.kind_ = Kind::markov;
    p.n_states_ = model.alphabet_size();
    p.pi_ = model.stationary();
    p.trans_.resize(p.n_states_ * p.n_states_);
    for (std::size_t i = 0; i < p.n_states_; ++i)
        for (std::size_t j = 0; j < p.n_states_; ++j)
            p.trans_[i * p.n_states_ + j] = model.transition(i, j);
    return p;
}

MixingProfile MixingProfile::exponential(double c, double beta) {
    if (!(c >= 0.0) || !(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("MixingProfile::exponential: need c >= 0, beta in (0,1)");
    MixingProfile p;
    p.kind_ = Kind::exponential;
    p.c_ = c;
    p.beta_ = beta;
    return p;
}

MixingProfile MixingProfile::constant(double value) {
    if (!(value >= 0.0)) throw std::invalid_argument("MixingProfile::constant: need value >= 0");
    MixingProfile p;
    p.kind_ = Kind::constant;
    p.c_ = value;
    return p;
}

double MixingProfile::psi(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("MixingProfile::psi: n must be >= 1");
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return c_;
        case Kind::exponential: return c_ * std::pow(beta_, static_cast<double>(n));
        case Kind::markov: {
            const auto pn = mat_pow(trans_, n, n_states_);
            double best = 0.0;
            for (std::size_t i = 0; i < n_states_; ++i) {
                if (pi_[i] == 0.0) continue;
                for (std::size_t j = 0; j < n_states_; ++j)
                    if (pi_[j] > 0.0)
                        best = std::max(best, std::fabs(pn[i * n_states_ + j] / pi_[j] - 1.0));
            }
            return best;
        }
    }
    return 0.0;
}

std::optional<double> MixingProfile::decay_beta_estimate() const {
    switch (kind_) {
        case Kind::zero:
        case Kind::constant: return std::nullopt;
        case Kind::exponential: return beta_;
        case Kind::markov: {
            // use the largest gap where psi still sits above roundoff noise
            for (const std::int64_t n : {32, 16, 8, 4, 2, 1}) {
                const double a = psi(n);
                if (a > 1e-9) return psi(n + 1) / a;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace geostop
