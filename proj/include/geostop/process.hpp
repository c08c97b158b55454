#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geostop/rng.hpp"
#include "geostop/words.hpp"

namespace geostop {

// A validated stationary source over a finite alphabet with exact marginal
// and cylinder probabilities. Markov chains must be irreducible and
// aperiodic; the stationary law is solved densely for up to 64 states and by
// power iteration above. Immutable after construction and safe to share
// across workers.
class ProcessModel {
public:
    enum class Variant { iid, markov };

    static ProcessModel iid(std::vector<double> weights, std::vector<std::string> names = {});
    static ProcessModel markov(std::vector<std::vector<double>> rows,
                               std::vector<std::string> names = {});

    Variant variant() const { return variant_; }
    std::size_t alphabet_size() const { return stationary_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    Symbol symbol_id(const std::string& name) const;  // throws on unknown symbols
    const std::vector<double>& stationary() const { return stationary_; }
    double transition(Symbol from, Symbol to) const;

    Symbol sample_initial(PhiloxStream& rng) const;
    Symbol sample_next(Symbol prev, PhiloxStream& rng) const;
    std::vector<Symbol> sample_path(std::size_t length, PhiloxStream& rng) const;

    // Q(subset) under the stationary marginal.
    double marginal_prob(std::span<const Symbol> subset) const;
    // P[word] = pi(w0) * prod transition(w_i, w_{i+1}); plain product for iid.
    double cylinder_prob(std::span<const Symbol> word) const;

private:
    ProcessModel() = default;
    void finalize();
    Symbol sample_from_cdf(const std::vector<double>& cdf, PhiloxStream& rng) const;

    Variant variant_ = Variant::iid;
    std::vector<std::string> names_;
    std::vector<double> stationary_;           // == weights for iid
    std::vector<std::vector<double>> rows_;    // markov only
    std::vector<double> stationary_cdf_;
    std::vector<std::vector<double>> row_cdfs_;
    bool uniform_ = false;
};

// psi mixing coefficient at time gap n. iid gives 0; for a Markov chain the
// supremum over separated event algebras is attained on single-coordinate
// events flanking the gap, giving max_{i,j} |P^n(i,j)/pi(j) - 1| (checked
// against the exhaustive oracle in the tests rather than proved here).
double psi_coefficient(const ProcessModel& model, std::int64_t n);

// Exponential cylinder-decay rate: every cylinder of length n has measure
// <= exp(-upsilon * n). Verified by exhaustive enumeration up to
// validation_len; throws if a violating cylinder exists or if some symbol or
// transition carries full mass.
double upsilon_rate(const ProcessModel& model, int validation_len);

// What the bound evaluators consume: psi as a function of the gap.
class MixingProfile {
public:
    static MixingProfile zero();
    static MixingProfile from_model(const ProcessModel& model);
    static MixingProfile exponential(double c, double beta);
    static MixingProfile constant(double value);  // test/diagnostic profile

    double psi(std::int64_t n) const;
    // gap == nullopt encodes +infinity, where psi vanishes.
    double psi_at_gap(std::optional<std::int64_t> gap) const {
        return gap ? psi(*gap) : 0.0;
    }
    // Ratio estimate psi(33)/psi(32); nullopt when psi is identically zero.
    std::optional<double> decay_beta_estimate() const;

private:
    enum class Kind { zero, markov, exponential, constant };
    Kind kind_ = Kind::zero;
    double c_ = 0.0, beta_ = 0.0;
    std::vector<double> trans_;  // row-major copy for the markov kind
    std::vector<double> pi_;
    std::size_t n_states_ = 0;
};

}  // namespace geostop
