#pragma once

#include "expwalk/linalg.hpp"
#include "expwalk/rng.hpp"
#include "expwalk/weights.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace expwalk {

struct Atom {
    Mat g;
    double weight = 0.0;
};

/// Probability measure on d x d invertible matrices. Atomic by default; a
/// sampler may stand in for laws without finite support, in which case only
/// sampling-based operations are available.
class GroupMeasure {
public:
    using Sampler = std::function<Mat(CounterRng&)>;

    GroupMeasure() = default;
    explicit GroupMeasure(std::vector<Atom> atoms, std::uint64_t seed = 0);
    GroupMeasure(int dim, Sampler sampler, std::uint64_t seed = 0);

    static GroupMeasure dirac(const Mat& g);
    static GroupMeasure uniform(const std::vector<Mat>& gs);

    int dim() const { return dim_; }
    bool is_atomic() const { return !sampler_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    std::uint64_t seed() const { return seed_; }

    const std::optional<ParabolicProfile>& profile() const { return profile_; }
    /// Attaches a profile after checking every atom is block upper triangular.
    void set_profile(ParabolicProfile p);

    /// Index of a random atom (atomic measures only).
    std::size_t draw_index(CounterRng& rng) const;
    /// A random element.
    Mat draw(CounterRng& rng) const;

private:
    int dim_ = 0;
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
    Sampler sampler_;
    std::uint64_t seed_ = 0;
    std::optional<ParabolicProfile> profile_;
};

/// n i.i.d. draws (g_1, ..., g_n); the walk applies g_n ... g_1.
std::vector<Mat> sample_word(const GroupMeasure& mu, int n, std::uint64_t seed);
std::vector<std::size_t> sample_word_indices(const GroupMeasure& mu, int n, std::uint64_t seed);

constexpr std::size_t kDefaultWordCap = 1'000'000;
constexpr double kMergeTol = 1e-10;

/// Exact mu^{*n}: all products g_n ... g_1 with multiplied weights, merged
/// when they agree entrywise within kMergeTol.
GroupMeasure convolution_support(const GroupMeasure& mu, int n, std::size_t cap = kDefaultWordCap);

/// Sum of weight * N(g)^delta over atoms.
double exp_moment_estimate(const GroupMeasure& mu, double delta);

/// Mean of the A'-parameter lambda over atoms, each factored in P = K'A'U.
double lambda_average(const GroupMeasure& mu, const ParabolicProfile& profile);

/// |atoms|^n, saturating at SIZE_MAX.
std::size_t word_count(std::size_t atoms, int n);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const GroupMeasure& mu);
GroupMeasure measure_from_json(const nlohmann::json& j);
GroupMeasure load_measure(const std::string& path);
void save_measure(const GroupMeasure& mu, const std::string& path);

/// Shortest decimal string that round-trips the double exactly.
std::string exact_decimal(double x);

}  // namespace expwalk
