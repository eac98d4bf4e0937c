// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 once every criterion has been evaluated, whatever the
// verdicts; --strict makes any FAIL exit 1. A crash or an unexpected
// exception exits nonzero either way.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "feedrank/errors.hpp"
#include "feedrank/feed.hpp"
#include "feedrank/metrics.hpp"
#include "feedrank/profile.hpp"
#include "feedrank/ranker.hpp"
#include "feedrank/simulation.hpp"
#include "feedrank/store.hpp"
#include "oracles.hpp"

using namespace feedrank;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(digits);
    out << v;
    return out.str();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

oracle::Dense dense(const TermVector& v) {
    oracle::Dense out;
    for (const auto& [t, w] : v) out[t] = w;
    return out;
}

// ---------------------------------------------------------------- equations

Verdict equation_oracles(std::size_t instances) {
    std::mt19937_64 rng(17);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto vec = [&](std::size_t vocab) {
        std::vector<TermVector::Entry> e;
        for (std::size_t t = 0; t < vocab; ++t)
            if (rng() % 2) e.emplace_back("w" + std::to_string(t), 0.01 + unit());
        return TermVector::from_entries(std::move(e));
    };

    double worst_cd = 0, worst_rp = 0, worst_cos = 0;
    std::size_t fold_mismatch = 0;
    for (std::size_t n = 0; n < instances; ++n) {
        const std::size_t items = 1 + rng() % 6;
        std::vector<OfferedEntry> offered;
        std::vector<double> scores;
        for (std::size_t i = 0; i < items; ++i) {
            // Coarse grid so ties and zeros turn up.
            const double s = rng() % 4 == 0 ? 0.0 : static_cast<double>(rng() % 5) / 4.0 + unit() * (rng() % 2);
            offered.push_back({"https://o/" + std::to_string(i), s});
            scores.push_back(s);
        }
        std::set<int> picks;
        ChosenSet chosen;
        while (picks.empty()) {
            for (std::size_t i = 0; i < items; ++i) {
                if (rng() % 2) {
                    picks.insert(static_cast<int>(i));
                    chosen.insert(offered[i].hyperlink);
                }
            }
        }
        worst_cd = std::max(worst_cd, std::abs(*c_d_rate(offered, chosen) - oracle::c_d(scores, picks)));
        worst_rp = std::max(worst_rp, std::abs(r_precision(offered, chosen) - oracle::r_precision(picks)));

        const std::size_t vocab = 1 + rng() % 10;
        const TermVector p = vec(vocab), w = vec(vocab);
        worst_cos = std::max(worst_cos, std::abs(cosine_score(p, w) - oracle::cosine(dense(p), dense(w))));

        TermVector ps = vec(vocab);
        if (ps.empty()) ps = TermVector{{"w0", 1.0}};
        const TermVector pr = rng() % 3 ? vec(vocab) : TermVector{};
        const double a = static_cast<double>(1 + rng() % 9) / 10.0;
        UserProfile profile;
        profile.vector = p;
        profile.config = ProfileConfig::from_a(a);
        const UserProfile next = update_profile(profile, ps, pr);
        const oracle::Dense expect =
            oracle::update(dense(p), dense(ps), dense(pr), profile.config.a(), profile.config.b());
        if (dense(next.vector) != expect || next.sessions_completed != 1) ++fold_mismatch;
    }
    const double tol = 1e-9;
    Verdict v;
    v.pass = worst_cd <= tol && worst_rp <= tol && worst_cos <= tol && fold_mismatch == 0;
    v.detail = std::to_string(instances) + " instances; max |dC_D|=" + sci(worst_cd) +
               " max |dRP|=" + sci(worst_rp) + " max |dcos|=" + sci(worst_cos) +
               " fold mismatches=" + std::to_string(fold_mismatch) + " (tol 1e-9, fold exact)";
    return v;
}

// ---------------------------------------------------------------- simulation

std::vector<double> present(const std::vector<std::optional<double>>& row, std::vector<double>* xs) {
    std::vector<double> ys;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j]) {
            xs->push_back(static_cast<double>(j + 1));
            ys.push_back(*row[j]);
        }
    }
    return ys;
}

std::optional<double> average(const std::vector<std::optional<double>>& row) {
    std::vector<double> xs;
    const auto ys = present(row, &xs);
    if (ys.empty()) return std::nullopt;
    double total = 0;
    for (double y : ys) total += y;
    return total / static_cast<double>(ys.size());
}

std::optional<double> slope(const std::vector<std::optional<double>>& row) {
    std::vector<double> xs;
    const auto ys = present(row, &xs);
    if (ys.size() < 2) return std::nullopt;
    return oracle::ols_slope(xs, ys);
}

Verdict final_session_vs_random(const EvalReport& report, double runtime) {
    const auto cos = report.series(RankingKind::Cosine, false);
    const auto rnd = report.series(RankingKind::Random, false);
    std::size_t wins = 0;
    for (std::size_t u = 0; u < cos.size(); ++u) {
        const auto& a = cos[u].back();
        const auto& b = rnd[u].back();
        if (a && (!b || *a > *b)) ++wins;
    }
    Verdict v;
    v.pass = wins >= 14 && cos.size() == 15 && runtime < 60.0;
    v.detail = "final-session C_D cosine > random for " + std::to_string(wins) + "/" + std::to_string(cos.size()) +
               " users (need >= 14/15); experiment " + fixed(runtime, 1) + " s (limit 60 s)";
    return v;
}

Verdict rprecision_trend(const EvalReport& report) {
    const auto rp = report.series(RankingKind::Cosine, true);
    std::size_t rising = 0;
    for (const auto& row : rp) {
        const auto s = slope(row);
        if (s && *s > 0) ++rising;
    }
    Verdict v;
    v.pass = rising >= 13 && rp.size() == 15;
    v.detail = "R-Precision trend slope > 0 for " + std::to_string(rising) + "/" + std::to_string(rp.size()) +
               " users (need >= 13/15)";
    return v;
}

Verdict averages_vs_binary(const EvalReport& report) {
    const auto cd_c = report.series(RankingKind::Cosine, false), cd_b = report.series(RankingKind::Binary, false);
    const auto rp_c = report.series(RankingKind::Cosine, true), rp_b = report.series(RankingKind::Binary, true);
    std::size_t cd_wins = 0, rp_wins = 0;
    auto beats = [](const auto& a, const auto& b) { return a && (!b || *a > *b); };
    for (std::size_t u = 0; u < cd_c.size(); ++u) {
        cd_wins += beats(average(cd_c[u]), average(cd_b[u]));
        rp_wins += beats(average(rp_c[u]), average(rp_b[u]));
    }
    Verdict v;
    v.pass = cd_wins == cd_c.size() && rp_wins == cd_c.size() && cd_c.size() == 15;
    v.detail = "average C_D cosine > binary for " + std::to_string(cd_wins) + "/" + std::to_string(cd_c.size()) +
               ", average R-Precision for " + std::to_string(rp_wins) + "/" + std::to_string(cd_c.size()) +
               " (need all); binary arm ranks the same candidate pools";
    return v;
}

Verdict difference_trends(const EvalReport& report) {
    std::string detail;
    bool pass = true;
    for (bool rp : {false, true}) {
        const auto diff =
            difference_series(report.series(RankingKind::Cosine, rp), report.series(RankingKind::Binary, rp));
        std::vector<std::optional<double>> mean, sd;
        for (const auto& p : diff) {
            mean.push_back(p.mean_diff);
            sd.push_back(p.stddev);
        }
        const auto m = slope(mean), s = slope(sd);
        pass = pass && m && *m > 0 && s && *s <= 0;
        detail += std::string(rp ? "; R-Precision" : "C_D") + " mean-diff slope " + (m ? fixed(*m, 5) : "n/a") +
                  " (need > 0), stddev slope " + (s ? fixed(*s, 5) : "n/a") + " (need <= 0)";
    }
    return {pass, detail};
}

// ---------------------------------------------------------------- storage

SessionRecord random_session(std::mt19937_64& rng, const std::string& user, std::size_t salt) {
    static const std::vector<std::string> words{"comet", "probe", "orbit", "budget", "vote", "senate", "match",
                                                "goal",  "storm", "river", "bank",   "rate", "café",  "naïve"};
    SessionRecord r;
    r.user_id = user;
    r.mode = rng() % 4 ? RankingMode::cosine() : RankingMode::random(rng());
    const std::size_t n = 1 + rng() % 14;
    for (std::size_t i = 0; i < n; ++i) {
        ScoredItem s;
        std::string h;
        for (std::size_t k = 0, len = 2 + rng() % 5; k < len; ++k) h += (k ? " " : "") + words[rng() % words.size()];
        s.item.headline = h;
        s.item.hyperlink = "https://acc.example/" + user + "/" + std::to_string(salt) + "/" + std::to_string(i);
        if (rng() % 2) s.item.summary = "About " + h + " and " + words[rng() % words.size()];
        s.item.feed_id = "feed" + std::to_string(rng() % 3);
        s.item.fetched_at = from_unix_seconds(1'000'000 + static_cast<std::int64_t>(salt));
        s.score = static_cast<double>(rng() % 1000) / 997.0;
        s.rank = i + 1;
        r.offered.push_back(s);
        r.cosine_scores.push_back(s.score);
    }
    for (const auto& s : r.offered)
        if (rng() % 3 == 0) r.chosen.insert(s.item.hyperlink);
    r.started_at = from_unix_seconds(2'000'000 + static_cast<std::int64_t>(salt) * 60);
    r.ended_at = r.started_at + std::chrono::seconds(30);
    return r;
}

SessionRecord commit(SessionStore& store, SessionRecord r) {
    const ProfileSnapshot snap = store.load_snapshot(r.user_id);
    r.profile_version_before = snap.version;
    std::optional<UserProfile> after;
    if (!r.chosen.empty()) {
        const SessionSelections sel = r.selections();
        after = update_profile(snap.profile, session_profile(sel), summary_profile(sel));
    }
    return store.append_session(std::move(r), after);
}

bool replays_exactly(const SessionStore& store, const std::string& user) {
    std::vector<SessionSelections> history;
    for (const auto& r : store.list_sessions(user)) history.push_back(r.selections());
    const UserProfile stored = store.load_profile(user);
    return replay_profile(history, stored.config, Tokenizer()) == stored;
}

Verdict replay_integrity(const fs::path& scratch) {
    const fs::path root = scratch / "store";
    fs::remove_all(root);
    std::mt19937_64 rng(4242);
    std::size_t users = 0, sessions = 0, replay_failures = 0;
    {
        SessionStore store(root, ProfileConfig::from_a(0.5));
        for (int u = 0; u < 8; ++u) {
            const std::string user = "user" + std::to_string(u);
            const std::size_t n = 1 + rng() % 60;
            for (std::size_t s = 0; s < n; ++s) commit(store, random_session(rng, user, s));
            sessions += n;
            ++users;
            if (!replays_exactly(store, user)) ++replay_failures;
        }
    }

    // Cut the journal at every byte of its final line, reopen, and check the
    // previous commit is intact and the store still accepts appends.
    const std::string user = "user0";
    const fs::path journal = root / "users" / user / "journal.jsonl";
    std::string full = slurp(journal);
    {
        SessionStore store(root);
        commit(store, random_session(rng, user, 999));
    }
    const std::string extended = slurp(journal);
    SessionStore before_store(root);
    spit(journal, full);
    const UserProfile before = before_store.load_profile(user);
    const std::size_t before_count = before_store.list_sessions(user).size();

    std::size_t cuts = 0, corrupted = 0;
    for (std::size_t cut = full.size(); cut < extended.size(); ++cut) {
        spit(journal, extended.substr(0, cut));
        SessionStore store(root);
        ++cuts;
        if (store.load_profile(user) != before || store.list_sessions(user).size() != before_count) {
            ++corrupted;
            continue;
        }
        if ((cut - full.size()) % 11 == 0) {
            commit(store, random_session(rng, user, 2000 + cut));
            SessionStore reopened(root);
            if (reopened.list_sessions(user).size() != before_count + 1 || !replays_exactly(reopened, user))
                ++corrupted;
        }
    }
    spit(journal, extended);
    fs::remove_all(root);

    Verdict v;
    v.pass = replay_failures == 0 && corrupted == 0 && cuts > 0;
    v.detail = std::to_string(users) + " users / " + std::to_string(sessions) + " sessions replayed, " +
               std::to_string(replay_failures) + " mismatches; " + std::to_string(cuts) +
               " truncation points, " + std::to_string(corrupted) + " corrupted";
    return v;
}

// ---------------------------------------------------------------- parsing

std::string fixture(const std::string& name) { return slurp(fs::path(FEEDRANK_FIXTURES) / name); }

Verdict parser_robustness(double fuzz_seconds) {
    const Timestamp now = from_unix_seconds(1'200'000'000);
    std::vector<std::string> problems;
    auto expect_items = [&](const std::string& name, std::size_t n) {
        try {
            const auto got = parse_feed(fixture(name), "f", now).size();
            if (got != n) problems.push_back(name + " gave " + std::to_string(got));
        } catch (const std::exception& e) {
            problems.push_back(name + ": " + e.what());
        }
    };
    expect_items("rss_minimal.xml", 1);
    expect_items("rss_mixed.xml", 2);
    expect_items("atom_three.xml", 2);
    expect_items("rss_windows1252.xml", 1);
    for (const char* name : {"not_a_feed.html", "html5_page.html", "rss_rdf_like.xml"}) {
        try {
            parse_feed(fixture(name), "f", now);
            problems.push_back(std::string(name) + " accepted");
        } catch (const UnknownFormat&) {
        }
    }
    if (import_opml(fixture("subscriptions_flat.opml")).size() != 2) problems.push_back("flat opml");
    if (import_opml(fixture("subscriptions_nested.opml")).size() != 3) problems.push_back("nested opml");

    const std::vector<std::string> seeds{fixture("rss_minimal.xml"), fixture("rss_mixed.xml"),
                                         fixture("atom_three.xml"), fixture("rss_windows1252.xml"),
                                         fixture("not_a_feed.html")};
    const std::vector<std::string> fragments{"<item>", "</item>", "<entry>", "<![CDATA[", "]]>", "&amp;", "&#x0;",
                                             "<link href=\"../x\"/>", "<title type=\"xhtml\">", "<?xml ?>",
                                             "<!DOCTYPE x [<!ENTITY a \"&a;\">]>", "\xC3", "\xFF\xFE", "xml:base=\"::\""};
    std::mt19937_64 rng(99);
    const auto start = Clock::now();
    std::size_t runs = 0, unexpected = 0;
    while (seconds_since(start) < fuzz_seconds) {
        for (int batch = 0; batch < 64; ++batch, ++runs) {
            std::string doc = seeds[rng() % seeds.size()];
            for (std::size_t e = 0, edits = 1 + rng() % 10; e < edits && !doc.empty(); ++e) {
                const std::size_t pos = rng() % doc.size();
                switch (rng() % 5) {
                    case 0: doc[pos] = static_cast<char>(rng() & 0xFF); break;
                    case 1: doc.erase(pos, 1 + rng() % 24); break;
                    case 2: doc.insert(pos, doc.substr(rng() % doc.size(), rng() % 64)); break;
                    case 3: doc.insert(pos, fragments[rng() % fragments.size()]); break;
                    default: doc.resize(pos); break;
                }
            }
            try {
                parse_feed(doc, "f", now, "https://fuzz.example/feed");
            } catch (const ParseError&) {
            } catch (const UnknownFormat&) {
            } catch (const std::exception& e) {
                if (++unexpected <= 3) problems.push_back(std::string("unexpected exception: ") + e.what());
            }
        }
    }

    Verdict v;
    v.pass = problems.empty() && unexpected == 0;
    v.detail = "fixtures and OPML counts " + std::string(problems.empty() ? "ok" : "wrong") + "; " +
               std::to_string(runs) + " mutated documents in " + fixed(seconds_since(start), 1) +
               " s, no crash, " + std::to_string(unexpected) + " unexpected exceptions";
    for (const auto& p : problems) v.detail += "; " + p;
    return v;
}

// ---------------------------------------------------------------- determinism

int run_cli(const std::string& args) {
    const std::string command = std::string(FEEDRANK_CLI) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(command.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Verdict determinism(const fs::path& plan_file, const fs::path& scratch) {
    const fs::path a = scratch / "run_a", b = scratch / "run_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const int sa = run_cli("experiment --plan " + plan_file.string() + " --out " + a.string());
    const int sb = run_cli("experiment --plan " + plan_file.string() + " --out " + b.string());
    std::size_t files = 0, differing = 0;
    if (sa == 0 && sb == 0) {
        for (const auto& entry : fs::directory_iterator(a)) {
            ++files;
            const fs::path other = b / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
        }
        for (const auto& entry : fs::directory_iterator(b))
            if (!fs::exists(a / entry.path().filename())) ++differing;
    }
    fs::remove_all(a);
    fs::remove_all(b);
    Verdict v;
    v.pass = sa == 0 && sb == 0 && files >= 7 && differing == 0;
    v.detail = "two `feedrank experiment` runs: exit " + std::to_string(sa) + "/" + std::to_string(sb) + ", " +
               std::to_string(files) + " CSVs, " + std::to_string(differing) + " differ";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feedrank acceptance run"};
    std::string plan_path = FEEDRANK_DEFAULT_PLAN;
    bool strict = false;
    app.add_option("--plan", plan_path, "Experiment plan")->check(CLI::ExistingFile);
    app.add_flag("--strict", strict, "Exit 1 when any criterion fails");
    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::warn);

    const fs::path scratch = fs::temp_directory_path() / ("feedrank_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(scratch);
    std::size_t failed = 0;
    auto report = [&](const std::string& name, const std::function<Verdict()>& check) {
        const auto start = Clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << " [" << fixed(seconds_since(start), 2) << " s] "
                  << v.detail << std::endl;
    };

    report("equation-oracles", [] {
        const auto start = Clock::now();
        Verdict v = equation_oracles(1000);
        const double t = seconds_since(start);
        v.pass = v.pass && t < 10.0;
        v.detail += "; " + fixed(t, 3) + " s (limit 10 s)";
        return v;
    });

    const ExperimentPlan plan = load_plan(plan_path);
    const auto start = Clock::now();
    const EvalReport result = run_experiment(plan);
    const double runtime = seconds_since(start);
    report("cosine-beats-random-final-session", [&] { return final_session_vs_random(result, runtime); });
    report("rprecision-trend-rises", [&] { return rprecision_trend(result); });
    report("cosine-beats-binary-averages", [&] { return averages_vs_binary(result); });
    report("cosine-binary-gap-trends", [&] { return difference_trends(result); });
    report("replay-integrity", [&] { return replay_integrity(scratch); });
    report("parser-robustness", [&] { return parser_robustness(60.0); });
    report("experiment-determinism", [&] { return determinism(plan_path, scratch); });

    fs::remove_all(scratch);
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << " (8 criteria)" << std::endl;
    return strict && failed > 0 ? 1 : 0;
}
