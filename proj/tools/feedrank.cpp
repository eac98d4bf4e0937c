// feedrank command line: serve, fetch, rank, feeds, experiment, replay.
//
// Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "feedrank/config.hpp"
#include "feedrank/decimal.hpp"
#include "feedrank/errors.hpp"
#include "feedrank/http_api.hpp"
#include "feedrank/profile.hpp"
#include "feedrank/service.hpp"
#include "feedrank/simulation.hpp"
#include "feedrank/store.hpp"

namespace fs = std::filesystem;
using namespace feedrank;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tabs and newlines would break the TSV columns.
std::string cell(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void check_user(const std::string& user) {
    if (!valid_user_id(user)) throw UsageError("invalid user id '" + user + "'");
}

struct Common {
    std::optional<fs::path> config_path;
    std::optional<fs::path> data_dir;

    ServiceConfig load() const {
        ServiceConfig config = load_service_config(config_path, process_environment());
        if (data_dir) config.data_dir = *data_dir;
        config.validate();
        return config;
    }
};

int cmd_fetch(const Common& common) {
    FeedService service(common.load());
    std::cout << "feed_id\tparsed\tadded\tstatus\turl\n";
    for (const PollOutcome& o : service.poll_once()) {
        std::string status = "ok";
        if (o.skipped) status = "backoff";
        else if (o.not_modified) status = "not_modified";
        else if (o.error) status = "error: " + *o.error;
        std::cout << o.feed_id << '\t' << o.parsed << '\t' << o.added << '\t' << cell(status) << '\t'
                  << o.url << '\n';
    }
    return kOk;
}

struct RankArgs {
    std::string user;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> page_size;
};

int cmd_rank(const Common& common, const RankArgs& args) {
    check_user(args.user);
    if (args.seed && args.mode != "random") throw UsageError("--seed only applies to --mode random");
    FeedService service(common.load());
    std::optional<std::uint64_t> seed = args.seed;
    if (args.mode == "random" && !seed) seed = service.next_session_seed(args.user);
    const RankingMode mode = RankingMode::parse(args.mode, seed);
    const auto [page, cosine] = service.preview(args.user, mode, args.page_size.value_or(service.config().page_size));
    std::cout << "rank\tscore\theadline\thyperlink\n";
    for (const ScoredItem& s : page)
        std::cout << s.rank << '\t' << format_double(s.score) << '\t' << cell(s.item.headline) << '\t'
                  << cell(s.item.hyperlink) << '\n';
    return kOk;
}

struct FeedArgs {
    std::string user;
    std::string url;
    std::optional<std::string> title;
    std::string feed_id;
    fs::path opml;
};

void print_feeds(const std::vector<FeedSource>& feeds) {
    std::cout << "feed_id\ttitle\turl\n";
    for (const FeedSource& f : feeds)
        std::cout << f.feed_id << '\t' << cell(f.title.value_or("")) << '\t' << f.url << '\n';
}

int cmd_experiment(const fs::path& plan_path, const fs::path& out) {
    const ExperimentPlan plan = load_plan(plan_path);
    const EvalReport report = run_experiment(plan);
    fs::create_directories(out);
    write_report_csv(report, out);
    std::cout << "wrote " << out.string() << '\n';
    return kOk;
}

int cmd_replay(const Common& common, const std::string& user) {
    check_user(user);
    const ServiceConfig config = common.load();
    SessionStore store(config.data_dir, config.profile);
    const UserProfile stored = store.load_profile(user);

    std::vector<SessionSelections> history;
    for (const SessionRecord& r : store.list_sessions(user)) history.push_back(r.selections());
    Tokenizer tokenizer;
    if (config.stopwords_path) tokenizer = Tokenizer(load_stopwords(*config.stopwords_path));
    const UserProfile replayed = replay_profile(history, stored.config, tokenizer);

    std::size_t differences = 0;
    std::cout << "term\tstored\treplayed\n";
    auto show = [](std::optional<double> w) { return w ? format_double(*w) : std::string("-"); };
    // Merge walk over two term-sorted vectors.
    const auto& a = stored.vector.entries();
    const auto& b = replayed.vector.entries();
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        std::optional<double> left, right;
        std::string term;
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            term = a[i].first;
            left = a[i++].second;
        } else if (i == a.size() || b[j].first < a[i].first) {
            term = b[j].first;
            right = b[j++].second;
        } else {
            term = a[i].first;
            left = a[i++].second;
            right = b[j++].second;
        }
        if (left != right) {
            ++differences;
            std::cout << cell(term) << '\t' << show(left) << '\t' << show(right) << '\n';
        }
    }
    if (stored.sessions_completed != replayed.sessions_completed) {
        ++differences;
        std::cout << "#sessions_completed\t" << stored.sessions_completed << '\t' << replayed.sessions_completed
                  << '\n';
    }
    std::cerr << "user " << user << ": " << history.size() << " sessions, " << replayed.vector.size()
              << " terms, " << differences << " differences\n";
    return differences == 0 ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    // Diagnostics on stderr keep stdout parsable.
    spdlog::set_default_logger(spdlog::stderr_color_mt("feedrank"));

    CLI::App app{"Personalized feed ranker"};
    app.require_subcommand(1);
    app.fallthrough();  // --config and --data-dir may follow the subcommand
    Common common;
    app.add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--data-dir", common.data_dir, "Overrides data_dir from the config");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service and feed poller");
    std::optional<int> port;
    serve->add_option("--port", port, "Overrides the configured port")->check(CLI::Range(1, 65535));

    auto* fetch = app.add_subcommand("fetch", "Poll every due feed once and print per-feed counts");

    auto* rank = app.add_subcommand("rank", "Print the ranked page for a user as TSV");
    RankArgs rank_args;
    rank->add_option("--user", rank_args.user)->required();
    rank->add_option("--mode", rank_args.mode)->required()->check(CLI::IsMember({"cosine", "binary", "random"}));
    rank->add_option("--seed", rank_args.seed, "Random-mode seed; defaults to the next session's");
    rank->add_option("--page-size", rank_args.page_size)->check(CLI::PositiveNumber);

    auto* feeds = app.add_subcommand("feeds", "Manage a user's subscriptions");
    feeds->require_subcommand(1);
    feeds->fallthrough();
    FeedArgs feed_args;
    auto* feeds_list = feeds->add_subcommand("list", "List subscriptions");
    feeds_list->add_option("--user", feed_args.user)->required();
    auto* feeds_add = feeds->add_subcommand("add", "Subscribe to a feed URL");
    feeds_add->add_option("--user", feed_args.user)->required();
    feeds_add->add_option("--url", feed_args.url)->required();
    feeds_add->add_option("--title", feed_args.title);
    auto* feeds_remove = feeds->add_subcommand("remove", "Unsubscribe from a feed");
    feeds_remove->add_option("--user", feed_args.user)->required();
    feeds_remove->add_option("--id", feed_args.feed_id)->required();
    auto* feeds_import = feeds->add_subcommand("import", "Subscribe to every feed in an OPML file");
    feeds_import->add_option("--user", feed_args.user)->required();
    feeds_import->add_option("--opml", feed_args.opml)->required();

    auto* experiment = app.add_subcommand("experiment", "Run a simulated evaluation and write CSVs");
    fs::path plan_path, out_dir;
    experiment->add_option("--plan", plan_path, "Plan JSON file")->required();
    experiment->add_option("--out", out_dir, "Output directory")->required();

    auto* replay = app.add_subcommand("replay", "Rebuild a profile from the journal and diff it");
    std::string replay_user;
    replay->add_option("--user", replay_user)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*serve) {
            ServiceConfig config = common.load();
            if (port) config.port = *port;
            return run_server(config);
        }
        if (*fetch) return cmd_fetch(common);
        if (*rank) return cmd_rank(common, rank_args);
        if (*experiment) return cmd_experiment(plan_path, out_dir);
        if (*replay) return cmd_replay(common, replay_user);
        if (*feeds) {
            check_user(feed_args.user);
            FeedService service(common.load());
            if (*feeds_list) print_feeds(service.user_feeds(feed_args.user));
            if (*feeds_add) print_feeds({service.add_feed(feed_args.user, feed_args.url, feed_args.title)});
            if (*feeds_import) print_feeds(service.import_opml(feed_args.user, read_file(feed_args.opml)));
            if (*feeds_remove && !service.remove_feed(feed_args.user, feed_args.feed_id)) {
                std::cerr << "not subscribed to " << feed_args.feed_id << '\n';
                return kRuntimeError;
            }
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
