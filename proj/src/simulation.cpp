#include "feedrank/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "feedrank/decimal.hpp"
#include "feedrank/errors.hpp"

namespace feedrank {

double interest_overlap(const SimulatedUser& user, std::span<const std::string> distinct_terms) {
    if (distinct_terms.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& t : distinct_terms) hits += user.interest_terms.contains(t) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(distinct_terms.size());
}

std::vector<std::size_t> simulate_choice_indices(
    const SimulatedUser& user, std::span<const std::vector<std::string>> headline_terms, Rng& rng) {
    struct Candidate {
        double overlap;
        double tie_break;
        std::size_t index;
    };
    std::vector<Candidate> eligible;
    for (std::size_t i = 0; i < headline_terms.size(); ++i) {
        // Fixed draws per offered item keep the stream independent of eligibility.
        const double key = uniform_unit(rng);
        const double click = uniform_unit(rng);
        const double overlap = interest_overlap(user, headline_terms[i]);
        const bool interesting = overlap > 0.0 && overlap >= user.selection_threshold;
        if (click < (interesting ? user.click_probability : user.curiosity)) {
            eligible.push_back({overlap, key, i});
        }
    }
    std::sort(eligible.begin(), eligible.end(), [](const Candidate& l, const Candidate& r) {
        if (l.overlap != r.overlap) return l.overlap > r.overlap;
        if (l.tie_break != r.tie_break) return l.tie_break < r.tie_break;
        return l.index < r.index;
    });
    if (eligible.size() > user.max_choices_per_session) eligible.resize(user.max_choices_per_session);

    std::vector<std::size_t> out;
    out.reserve(eligible.size());
    for (const auto& c : eligible) out.push_back(c.index);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<std::string> distinct_sorted(TokenStream tokens) {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

}  // namespace

std::set<std::string> simulate_choices(const SimulatedUser& user,
                                       std::span<const ScoredItem> offered, Rng& rng,
                                       const Tokenizer& tokenizer) {
    std::vector<std::vector<std::string>> terms;
    terms.reserve(offered.size());
    for (const auto& s : offered) terms.push_back(distinct_sorted(tokenizer(s.item.headline)));
    std::set<std::string> chosen;
    for (std::size_t i : simulate_choice_indices(user, terms, rng)) chosen.insert(offered[i].item.hyperlink);
    return chosen;
}

void ExperimentPlan::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid plan: ") + what);
    };
    require(n_users > 0, "n_users must be positive");
    require(training_sessions > 0, "training_sessions must be positive");
    require(experimental_sessions > 0, "experimental_sessions must be positive");
    require(page_size > 0, "page_size must be positive");
    require(!modes.empty(), "modes must not be empty");
    require(corpus.topics > 0, "corpus.topics must be positive");
    require(corpus.topic_vocabulary > 0, "corpus.topic_vocabulary must be positive");
    require(corpus.background_vocabulary > 0, "corpus.background_vocabulary must be positive");
    require(corpus.topic_share >= 0.0 && corpus.topic_share <= 1.0, "corpus.topic_share must lie in [0, 1]");
    require(corpus.topic_zipf >= 0.0 && corpus.background_zipf >= 0.0, "zipf exponents must be >= 0");
    require(corpus.headline_min_terms > 0 && corpus.headline_min_terms <= corpus.headline_max_terms,
            "headline term range");
    require(corpus.summary_min_terms > 0 && corpus.summary_min_terms <= corpus.summary_max_terms,
            "summary term range");
    require(corpus.summary_probability >= 0.0 && corpus.summary_probability <= 1.0,
            "corpus.summary_probability must lie in [0, 1]");
    require(corpus.pool_size > 0, "corpus.pool_size must be positive");
    require(users.topics_per_user > 0 && users.topics_per_user <= corpus.topics,
            "users.topics_per_user must lie in [1, topics]");
    require(users.interest_fraction > 0.0 && users.interest_fraction <= 1.0,
            "users.interest_fraction must lie in (0, 1]");
    require(users.selection_threshold > 0.0 && users.selection_threshold <= 1.0,
            "users.selection_threshold must lie in (0, 1]");
    require(users.max_choices_per_session > 0, "users.max_choices_per_session must be positive");
    require(users.click_probability > 0.0 && users.click_probability <= 1.0,
            "users.click_probability must lie in (0, 1]");
    require(users.curiosity >= 0.0 && users.curiosity < 1.0, "users.curiosity must lie in [0, 1)");
}

namespace {

using nlohmann::json;

template <typename T>
void read_key(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!obj.at(key).is_number_unsigned())
            throw ConfigError(std::string("plan key '") + key + "' must be a non-negative integer");
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("plan key '") + key + "': " + e.what());
    }
}

RankingKind parse_kind(const std::string& name) {
    if (name == "cosine") return RankingKind::Cosine;
    if (name == "binary") return RankingKind::Binary;
    if (name == "random") return RankingKind::Random;
    throw ConfigError("unknown mode '" + name + "' in plan");
}

}  // namespace

ExperimentPlan parse_plan(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("plan must be a JSON object");

    ExperimentPlan plan;
    read_key(doc, "n_users", plan.n_users);
    read_key(doc, "training_sessions", plan.training_sessions);
    read_key(doc, "experimental_sessions", plan.experimental_sessions);
    read_key(doc, "page_size", plan.page_size);
    read_key(doc, "corpus_seed", plan.corpus_seed);
    read_key(doc, "update_profile_in_random", plan.update_profile_in_random);
    if (doc.contains("modes")) {
        std::vector<std::string> names;
        read_key(doc, "modes", names);
        plan.modes.clear();
        for (const auto& n : names) plan.modes.push_back(parse_kind(n));
    }
    if (doc.contains("profile")) {
        const auto& p = doc.at("profile");
        double a = plan.profile.a(), b = plan.profile.b();
        read_key(p, "a", a);
        read_key(p, "b", b);
        plan.profile = ProfileConfig(a, b);
    }
    if (doc.contains("corpus")) {
        const auto& c = doc.at("corpus");
        auto& cp = plan.corpus;
        read_key(c, "topics", cp.topics);
        read_key(c, "topic_vocabulary", cp.topic_vocabulary);
        read_key(c, "topic_zipf", cp.topic_zipf);
        read_key(c, "background_vocabulary", cp.background_vocabulary);
        read_key(c, "background_zipf", cp.background_zipf);
        read_key(c, "topic_share", cp.topic_share);
        read_key(c, "headline_min_terms", cp.headline_min_terms);
        read_key(c, "headline_max_terms", cp.headline_max_terms);
        read_key(c, "summary_probability", cp.summary_probability);
        read_key(c, "summary_min_terms", cp.summary_min_terms);
        read_key(c, "summary_max_terms", cp.summary_max_terms);
        read_key(c, "pool_size", cp.pool_size);
    }
    if (doc.contains("users")) {
        const auto& u = doc.at("users");
        auto& up = plan.users;
        read_key(u, "topics_per_user", up.topics_per_user);
        read_key(u, "interest_fraction", up.interest_fraction);
        read_key(u, "selection_threshold", up.selection_threshold);
        read_key(u, "max_choices_per_session", up.max_choices_per_session);
        read_key(u, "click_probability", up.click_probability);
        read_key(u, "curiosity", up.curiosity);
        read_key(u, "seed", up.seed);
    }
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read plan file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str());
}

namespace {

std::string synthetic_word(std::size_t index) {
    static constexpr std::string_view consonants = "bdfgklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    const std::size_t syllables = consonants.size() * vowels.size();
    std::string word;
    for (int k = 0; k < 3 || index > 0; ++k) {
        const std::size_t s = index % syllables;
        index /= syllables;
        word += consonants[s / vowels.size()];
        word += vowels[s % vowels.size()];
    }
    return word;
}

/// Rank-frequency sampler: weight of rank r is 1 / (r + 1)^exponent.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double exponent) : cumulative_(n) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
            cumulative_[r] = total;
        }
    }

    std::size_t draw(Rng& rng) const {
        const double u = uniform_unit(rng) * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

std::size_t draw_length(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + uniform_below(rng, hi - lo + 1);
}

constexpr std::int64_t kCorpusEpoch = 1167609600;  // 2007-01-01T00:00:00Z
constexpr std::int64_t kSecondsPerSession = 86400;

}  // namespace

SyntheticCorpus::SyntheticCorpus(const CorpusParams& params, std::uint64_t seed,
                                 std::size_t sessions, const Tokenizer& tokenizer) {
    std::size_t next_word = 0;
    auto fresh_word = [&] {
        for (;;) {
            std::string w = synthetic_word(next_word++);
            if (!tokenizer.stopwords().contains(w)) return w;
        }
    };
    topics_.resize(params.topics);
    for (auto& vocab : topics_) {
        vocab.reserve(params.topic_vocabulary);
        for (std::size_t i = 0; i < params.topic_vocabulary; ++i) vocab.push_back(fresh_word());
    }
    background_.reserve(params.background_vocabulary);
    for (std::size_t i = 0; i < params.background_vocabulary; ++i) background_.push_back(fresh_word());

    const ZipfSampler topic_sampler(params.topic_vocabulary, params.topic_zipf);
    const ZipfSampler background_sampler(params.background_vocabulary, params.background_zipf);

    auto draw_text = [&](Rng& rng, std::size_t topic, std::size_t length) {
        std::string text;
        for (std::size_t k = 0; k < length; ++k) {
            if (k > 0) text += ' ';
            if (uniform_unit(rng) < params.topic_share) {
                text += topics_[topic][topic_sampler.draw(rng)];
            } else {
                text += background_[background_sampler.draw(rng)];
            }
        }
        return text;
    };

    pools_.resize(sessions);
    for (std::size_t s = 0; s < sessions; ++s) {
        Rng rng(derive_seed(seed, s));
        Pool& pool = pools_[s];
        for (std::size_t k = 0; k < params.pool_size; ++k) {
            const std::size_t topic = uniform_below(rng, params.topics);
            NewsItem item;
            item.headline =
                draw_text(rng, topic, draw_length(rng, params.headline_min_terms, params.headline_max_terms));
            if (uniform_unit(rng) < params.summary_probability) {
                item.summary =
                    draw_text(rng, topic, draw_length(rng, params.summary_min_terms, params.summary_max_terms));
            }
            item.hyperlink = "https://news.sim.invalid/s" + std::to_string(s + 1) + "/item" +
                             std::to_string(k + 1);
            item.feed_id = "topic-" + std::to_string(topic + 1);
            item.fetched_at = from_unix_seconds(
                kCorpusEpoch + static_cast<std::int64_t>(s) * kSecondsPerSession +
                static_cast<std::int64_t>(uniform_below(rng, kSecondsPerSession)));

            auto tokens = tokenizer(item.headline);
            pool.headline_vectors.push_back(tf_vector(tokens));
            pool.headline_terms.push_back(distinct_sorted(std::move(tokens)));
            pool.summary_vectors.push_back(item.summary ? tf_vector(tokenizer(*item.summary)) : TermVector{});
            pool.topics.push_back(topic);
            pool.items.push_back(std::move(item));
        }
    }
}

namespace {

std::vector<std::vector<std::size_t>> topic_combinations(std::size_t n, std::size_t k,
                                                         std::size_t limit) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current(k);
    for (std::size_t i = 0; i < k; ++i) current[i] = i;
    while (out.size() < limit) {
        out.push_back(current);
        std::size_t i = k;
        while (i > 0 && current[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++current[i - 1];
        for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
    }
    return out;
}

}  // namespace

std::vector<SimulatedUser> make_users(const ExperimentPlan& plan, const SyntheticCorpus& corpus) {
    const auto& params = plan.users;
    Rng rng(derive_seed(params.seed, 0));
    auto combos = topic_combinations(corpus.topics(), params.topics_per_user, 100000);
    shuffle(std::span(combos), rng);

    std::vector<SimulatedUser> users;
    users.reserve(plan.n_users);
    for (std::size_t u = 0; u < plan.n_users; ++u) {
        SimulatedUser user;
        user.user_id = "user" + std::string(u + 1 < 10 ? "0" : "") + std::to_string(u + 1);
        user.interest_topics = combos[u % combos.size()];
        user.selection_threshold = params.selection_threshold;
        user.max_choices_per_session = params.max_choices_per_session;
        user.click_probability = params.click_probability;
        user.curiosity = params.curiosity;
        user.rng_seed = derive_seed(params.seed, 1000 + u);

        Rng interest_rng(derive_seed(params.seed, 2000 + u));
        for (std::size_t topic : user.interest_topics) {
            for (const auto& term : corpus.topic_terms(topic)) {
                if (uniform_unit(interest_rng) < params.interest_fraction) user.interest_terms.insert(term);
            }
        }
        if (user.interest_terms.empty()) {
            user.interest_terms.insert(corpus.topic_terms(user.interest_topics.front()).front());
        }
        users.push_back(std::move(user));
    }
    return users;
}

const ModeRun* UserReport::run(RankingKind mode) const {
    for (const auto& r : runs) {
        if (r.mode == mode) return &r;
    }
    return nullptr;
}

UserSeries EvalReport::series(RankingKind mode, bool r_precision) const {
    UserSeries out;
    out.reserve(users.size());
    for (const auto& user : users) {
        std::vector<std::optional<double>> row;
        if (const ModeRun* run = user.run(mode)) {
            for (const auto& m : run->sessions) row.push_back(r_precision ? m.r_precision : m.c_d);
        }
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

std::uint64_t mode_stream(RankingKind kind) {
    switch (kind) {
        case RankingKind::Cosine: return 1;
        case RankingKind::Binary: return 2;
        case RankingKind::Random: return 3;
    }
    return 0;
}

/// One simulated session: rank, measure, choose, fold into the profile.
SessionMetrics run_session(UserProfile& profile, const SyntheticCorpus::Pool& pool,
                           const RankingMode& mode, const SimulatedUser& user,
                           std::uint64_t choice_seed, std::size_t page_size, bool update) {
    const auto ranked = rank_indices(profile.vector, pool.items, pool.headline_vectors, mode, page_size);

    // Every mode is measured with the cosine score under the current profile.
    const CosineScorer scorer(profile.vector);
    std::vector<OfferedEntry> offered;
    std::vector<std::vector<std::string>> offered_terms;
    offered.reserve(ranked.size());
    offered_terms.reserve(ranked.size());
    for (const auto& r : ranked) {
        offered.push_back({pool.items[r.index].hyperlink, scorer(pool.headline_vectors[r.index])});
        offered_terms.push_back(pool.headline_terms[r.index]);
    }

    Rng choice_rng(choice_seed);
    const auto picks = simulate_choice_indices(user, offered_terms, choice_rng);
    ChosenSet chosen;
    for (std::size_t i : picks) chosen.insert(offered[i].hyperlink);

    SessionMetrics metrics;
    metrics.mode = mode.kind();
    metrics.n_chosen = chosen.size();
    const auto cd = c_d_components(offered, chosen);
    metrics.mean_chosen_score = cd.mean_chosen_score;
    metrics.max_mean_score = cd.max_mean_score;
    metrics.c_d = cd.rate;
    if (!chosen.empty()) metrics.r_precision = r_precision(offered, chosen);

    if (update && !picks.empty()) {
        std::vector<TermVector> headlines;
        std::vector<TermVector> summaries;
        for (std::size_t i : picks) {
            const std::size_t idx = ranked[i].index;
            headlines.push_back(pool.headline_vectors[idx]);
            if (!pool.summary_vectors[idx].empty()) summaries.push_back(pool.summary_vectors[idx]);
        }
        const TermVector session = vector_sum_scaled(headlines, 1.0 / static_cast<double>(headlines.size()));
        const TermVector summary =
            summaries.empty() ? TermVector{}
                              : vector_sum_scaled(summaries, 1.0 / static_cast<double>(summaries.size()));
        profile = update_profile(profile, session, summary);
    }
    return metrics;
}

}  // namespace

EvalReport run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    const std::size_t total = plan.training_sessions + plan.experimental_sessions;
    const SyntheticCorpus corpus(plan.corpus, plan.corpus_seed, total);
    const auto users = make_users(plan, corpus);

    EvalReport report;
    report.plan = plan;
    for (const auto& user : users) {
        UserProfile profile;
        profile.config = plan.profile;

        // Training: the first page has no profile to rank by, so it is shuffled.
        for (std::size_t t = 0; t < plan.training_sessions; ++t) {
            const auto mode = t == 0 ? RankingMode::random(derive_seed(user.rng_seed, 900000))
                                     : RankingMode::cosine();
            run_session(profile, corpus.pool(t), mode, user, derive_seed(user.rng_seed, 800000 + t),
                        plan.page_size, true);
        }

        UserReport user_report;
        user_report.user_id = user.user_id;
        for (RankingKind kind : plan.modes) {
            UserProfile arm = profile;
            ModeRun run;
            run.mode = kind;
            for (std::size_t j = 0; j < plan.experimental_sessions; ++j) {
                const std::uint64_t stream = mode_stream(kind) * 1000000 + j;
                const RankingMode mode = kind == RankingKind::Random
                                             ? RankingMode::random(derive_seed(user.rng_seed, 500000000 + stream))
                                         : kind == RankingKind::Binary ? RankingMode::binary()
                                                                       : RankingMode::cosine();
                const bool update = kind != RankingKind::Random || plan.update_profile_in_random;
                auto metrics = run_session(arm, corpus.pool(plan.training_sessions + j), mode, user,
                                           derive_seed(user.rng_seed, stream), plan.page_size, update);
                metrics.session_index = j + 1;
                run.sessions.push_back(metrics);
            }
            user_report.runs.push_back(std::move(run));
        }
        report.users.push_back(std::move(user_report));
    }
    return report;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

struct LineFit {
    double slope;
    double intercept;
};

std::optional<LineFit> fit_line(const std::vector<std::optional<double>>& values) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i]) points.emplace_back(static_cast<double>(i + 1), *values[i]);
    }
    if (points.size() < 2) return std::nullopt;
    const double slope = trend_slope(points);
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    return LineFit{slope, my - slope * mx};
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& v : values) {
        if (v) {
            total += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return total / static_cast<double>(n);
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::optional<double> at(const UserSeries& s, std::size_t u, std::size_t j) {
    if (u >= s.size() || j >= s[u].size()) return std::nullopt;
    return s[u][j];
}

std::optional<double> slope_of(const std::vector<std::optional<double>>& row) {
    auto fit = fit_line(row);
    return fit ? std::optional<double>(fit->slope) : std::nullopt;
}

void write_difference(const std::filesystem::path& path, const UserSeries& a, const UserSeries& b) {
    auto out = open_csv(path);
    out << "session,mean_diff,stddev,n_users\n";
    bool ready = !a.empty() && !b.empty() && !a.front().empty() && !b.front().empty();
    if (!ready) return;
    auto diff = difference_series(a, b);
    for (const auto& p : diff) {
        std::size_t n = 0;
        for (std::size_t u = 0; u < a.size(); ++u) n += (a[u][p.session - 1] && b[u][p.session - 1]) ? 1 : 0;
        out << p.session << ',' << cell(p.mean_diff) << ',' << cell(p.stddev) << ',' << n << '\n';
    }
}

}  // namespace

void write_report_csv(const EvalReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::size_t sessions = report.plan.experimental_sessions;

    {
        auto out = open_csv(dir / "session_metrics.csv");
        out << "user_id,mode,session,n_chosen,mean_chosen_score,max_mean_score,c_d,r_precision\n";
        for (const auto& user : report.users) {
            for (const auto& run : user.runs) {
                for (const auto& m : run.sessions) {
                    out << user.user_id << ',' << kind_name(run.mode)
                        << ',' << m.session_index << ',' << m.n_chosen << ','
                        << cell(m.mean_chosen_score) << ',' << cell(m.max_mean_score) << ','
                        << cell(m.c_d) << ',' << cell(m.r_precision) << '\n';
                }
            }
        }
    }

    const auto cd_cos = report.series(RankingKind::Cosine, false);
    const auto cd_bin = report.series(RankingKind::Binary, false);
    const auto cd_rnd = report.series(RankingKind::Random, false);
    const auto rp_cos = report.series(RankingKind::Cosine, true);
    const auto rp_bin = report.series(RankingKind::Binary, true);

    {
        auto out = open_csv(dir / "fig1_cd.csv");
        out << "user_id,session,c_d_cosine,c_d_random\n";
        for (std::size_t u = 0; u < report.users.size(); ++u) {
            for (std::size_t j = 0; j < sessions; ++j) {
                out << report.users[u].user_id << ',' << j + 1 << ',' << cell(at(cd_cos, u, j)) << ','
                    << cell(at(cd_rnd, u, j)) << '\n';
            }
        }
    }
    {
        auto out = open_csv(dir / "fig2_rprecision.csv");
        out << "user_id,session,r_precision_cosine,trend_cosine\n";
        for (std::size_t u = 0; u < report.users.size(); ++u) {
            const auto fit = fit_line(rp_cos[u]);
            for (std::size_t j = 0; j < sessions; ++j) {
                std::optional<double> trend;
                if (fit) trend = fit->intercept + fit->slope * static_cast<double>(j + 1);
                out << report.users[u].user_id << ',' << j + 1 << ',' << cell(at(rp_cos, u, j)) << ','
                    << cell(trend) << '\n';
            }
        }
    }
    auto write_averages = [&](const char* name, const char* metric, const UserSeries& cos,
                              const UserSeries& bin) {
        auto out = open_csv(dir / name);
        out << "user_id," << metric << "_avg_cosine," << metric << "_avg_binary," << metric
            << "_slope_cosine," << metric << "_slope_binary\n";
        for (std::size_t u = 0; u < report.users.size(); ++u) {
            out << report.users[u].user_id << ',' << cell(mean_of(cos[u])) << ',' << cell(mean_of(bin[u]))
                << ',' << cell(slope_of(cos[u])) << ',' << cell(slope_of(bin[u])) << '\n';
        }
    };
    write_averages("fig3_cd_avg.csv", "c_d", cd_cos, cd_bin);
    write_averages("fig4_rp_avg.csv", "r_precision", rp_cos, rp_bin);
    write_difference(dir / "fig5_cd_diff.csv", cd_cos, cd_bin);
    write_difference(dir / "fig6_rp_diff.csv", rp_cos, rp_bin);
}

}  // namespace feedrank
