#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "feedrank/profile.hpp"
#include "feedrank/store.hpp"

using namespace feedrank;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int status;
    std::string out;
};

CliRun invoke(const std::string& args) {
    const std::string command = std::string(FEEDRANK_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
    const int raw = ::pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("feedrank_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string data() const { return "--data-dir " + (dir_ / "data").string(); }

    void seed_history(const std::string& user, int sessions) {
        SessionStore store(dir_ / "data");
        for (int s = 0; s < sessions; ++s) {
            SessionRecord r;
            r.user_id = user;
            r.mode = RankingMode::cosine();
            const std::vector<std::string> heads{"Probe lands on comet", "Budget vote delayed", "Comet dust study"};
            for (std::size_t i = 0; i < heads.size(); ++i) {
                ScoredItem it;
                it.item.headline = heads[i];
                it.item.hyperlink = "https://n.example/" + std::to_string(s) + "/" + std::to_string(i);
                it.item.summary = "summary of " + heads[i];
                it.item.fetched_at = from_unix_seconds(100);
                it.rank = i + 1;
                r.offered.push_back(it);
                r.cosine_scores.push_back(0.0);
            }
            r.chosen.insert(r.offered[static_cast<std::size_t>(s) % 3].item.hyperlink);
            r.started_at = from_unix_seconds(1000 + s * 100);
            r.ended_at = from_unix_seconds(1050 + s * 100);
            const ProfileSnapshot snap = store.load_snapshot(user);
            r.profile_version_before = snap.version;
            const SessionSelections sel = r.selections();
            store.append_session(r, update_profile(snap.profile, session_profile(sel), summary_profile(sel)));
        }
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(invoke("").status, 2);
    EXPECT_EQ(invoke("no-such-command").status, 2);
    EXPECT_EQ(invoke(data() + " rank --user ann --mode cosine --seed 4").status, 2);
    EXPECT_EQ(invoke(data() + " rank --user 'bad id' --mode cosine").status, 2);
    EXPECT_EQ(invoke(data() + " experiment --plan " + (dir_ / "missing.json").string() + " --out " +
                       (dir_ / "out").string())
                  .status,
              2);
    EXPECT_EQ(invoke("--config " + (dir_ / "missing.json").string() + " rank --user ann").status, 2);
}

TEST_F(CliTest, RankOnEmptyStorePrintsHeader) {
    const CliRun r = invoke(data() + " rank --user ann --mode random --seed 3");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "rank\tscore\theadline\thyperlink\n");
}

TEST_F(CliTest, ExperimentWritesCsvs) {
    const fs::path plan = dir_ / "plan.json";
    std::ofstream(plan) << R"({"n_users": 2, "experimental_sessions": 3, "corpus": {"pool_size": 40}})";
    const CliRun r = invoke("experiment --plan " + plan.string() + " --out " + (dir_ / "out").string());
    EXPECT_EQ(r.status, 0);
    for (const char* name : {"session_metrics.csv", "fig1_cd.csv", "fig6_rp_diff.csv"})
        EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;

    std::ofstream(plan) << R"({"n_users": 0})";
    EXPECT_EQ(invoke("experiment --plan " + plan.string() + " --out " + (dir_ / "out").string()).status, 2);
}

TEST_F(CliTest, ReplayMatchesStoredProfileAndFlagsTampering) {
    seed_history("ann", 5);
    CliRun r = invoke(data() + " replay --user ann");
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(r.out, "term\tstored\treplayed\n");

    // Rewrite one stored weight in the latest snapshot.
    const fs::path journal = dir_ / "data" / "users" / "ann" / "journal.jsonl";
    std::ifstream in(journal, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    in.close();
    const auto last = text.rfind("\"snapshot\"");
    ASSERT_NE(last, std::string::npos);
    const auto weight = text.find("\":\"0.", last);
    ASSERT_NE(weight, std::string::npos);
    text.replace(weight + 3, 2, "0.00");
    std::ofstream(journal, std::ios::binary | std::ios::trunc) << text;

    r = invoke(data() + " replay --user ann");
    EXPECT_EQ(r.status, 1) << r.out;
    EXPECT_GT(r.out.size(), std::string("term\tstored\treplayed\n").size());
}
