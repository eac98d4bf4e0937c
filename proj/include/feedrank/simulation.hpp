#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "feedrank/metrics.hpp"
#include "feedrank/profile.hpp"
#include "feedrank/random.hpp"
#include "feedrank/ranker.hpp"

namespace feedrank {

/// Stand-in for a human reader: picks headlines whose distinct terms mostly
/// fall inside a fixed interest vocabulary.
struct SimulatedUser {
    std::string user_id;
    std::unordered_set<std::string> interest_terms;
    std::vector<std::size_t> interest_topics;
    double selection_threshold = 0.5;
    std::size_t max_choices_per_session = 14;
    double click_probability = 1.0;  // chance an eligible headline is actually opened
    double curiosity = 0.0;          // chance any other headline is opened anyway
    std::uint64_t rng_seed = 0;
};

/// Fraction of the headline's distinct terms that lie in the user's interests.
double interest_overlap(const SimulatedUser& user, std::span<const std::string> distinct_terms);

/// Chooses offered positions. A headline with overlap >= threshold is opened with
/// click_probability, any other with curiosity; at most max_choices_per_session
/// are kept, preferring higher overlap and breaking ties with `rng`.
/// Returns indices into `headline_terms` in ascending order.
std::vector<std::size_t> simulate_choice_indices(
    const SimulatedUser& user, std::span<const std::vector<std::string>> headline_terms, Rng& rng);

/// Same rule over a ranked page; returns chosen hyperlinks.
std::set<std::string> simulate_choices(const SimulatedUser& user,
                                       std::span<const ScoredItem> offered, Rng& rng,
                                       const Tokenizer& tokenizer = Tokenizer());

/// Parameters of the synthetic news stream.
struct CorpusParams {
    std::size_t topics = 6;
    std::size_t topic_vocabulary = 2000;
    double topic_zipf = 1.0;
    std::size_t background_vocabulary = 200;
    double background_zipf = 1.0;
    double topic_share = 0.7;  // probability a headline/summary term is drawn from its topic
    std::size_t headline_min_terms = 4;
    std::size_t headline_max_terms = 10;
    double summary_probability = 0.5;
    std::size_t summary_min_terms = 12;
    std::size_t summary_max_terms = 24;
    std::size_t pool_size = 150;  // candidates fetched per session

    friend bool operator==(const CorpusParams&, const CorpusParams&) = default;
};

struct UserModelParams {
    std::size_t topics_per_user = 2;
    double interest_fraction = 1.0;
    double selection_threshold = 0.3;
    std::size_t max_choices_per_session = 14;
    double click_probability = 1.0;
    double curiosity = 0.02;
    std::uint64_t seed = 1;

    friend bool operator==(const UserModelParams&, const UserModelParams&) = default;
};

struct ExperimentPlan {
    std::size_t n_users = 15;
    std::size_t training_sessions = 2;
    std::size_t experimental_sessions = 30;
    std::size_t page_size = 14;
    std::vector<RankingKind> modes{RankingKind::Cosine, RankingKind::Binary, RankingKind::Random};
    std::uint64_t corpus_seed = 2007;
    ProfileConfig profile;
    bool update_profile_in_random = true;
    CorpusParams corpus;
    UserModelParams users;

    /// Throws ConfigError on non-positive counts or out-of-range parameters.
    void validate() const;

    friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

/// Reads a JSON plan; omitted keys keep their defaults. Throws ConfigError.
ExperimentPlan load_plan(const std::filesystem::path& path);
ExperimentPlan parse_plan(std::string_view json_text);

struct SessionMetrics {
    std::size_t session_index = 0;  // 1-based within the experimental block
    std::size_t n_chosen = 0;
    std::optional<double> mean_chosen_score;
    std::optional<double> max_mean_score;
    std::optional<double> c_d;
    std::optional<double> r_precision;
    RankingKind mode = RankingKind::Cosine;
};

struct ModeRun {
    RankingKind mode = RankingKind::Cosine;
    std::vector<SessionMetrics> sessions;
};

struct UserReport {
    std::string user_id;
    std::vector<ModeRun> runs;

    const ModeRun* run(RankingKind mode) const;
};

struct EvalReport {
    ExperimentPlan plan;
    std::vector<UserReport> users;

    /// [user][session] series of one metric under one mode; empty rows when the mode was not run.
    UserSeries series(RankingKind mode, bool r_precision) const;
};

/// Synthetic corpus: topic vocabularies, background vocabulary and one
/// candidate pool per session, all derived from the corpus seed.
class SyntheticCorpus {
public:
    SyntheticCorpus(const CorpusParams& params, std::uint64_t seed, std::size_t sessions,
                    const Tokenizer& tokenizer = Tokenizer());

    /// Parallel arrays describing one session's candidates.
    struct Pool {
        std::vector<NewsItem> items;
        std::vector<std::size_t> topics;
        std::vector<TermVector> headline_vectors;
        std::vector<TermVector> summary_vectors;  // empty vector when no summary
        std::vector<std::vector<std::string>> headline_terms;  // distinct, sorted
    };

    std::size_t sessions() const noexcept { return pools_.size(); }
    const Pool& pool(std::size_t session) const { return pools_.at(session); }
    std::size_t topics() const noexcept { return topics_.size(); }
    const std::vector<std::string>& topic_terms(std::size_t topic) const { return topics_.at(topic); }
    const std::vector<std::string>& background_terms() const noexcept { return background_; }

private:
    std::vector<std::vector<std::string>> topics_;
    std::vector<std::string> background_;
    std::vector<Pool> pools_;
};

/// Builds the plan's simulated users from the corpus vocabularies.
std::vector<SimulatedUser> make_users(const ExperimentPlan& plan, const SyntheticCorpus& corpus);

/// Runs training sessions, then every mode over the same candidate pools,
/// each mode starting from the post-training profile.
EvalReport run_experiment(const ExperimentPlan& plan);

/// Writes the per-session and figure-analogue CSV files into `dir`.
void write_report_csv(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace feedrank
