#include "quizcram/course_model.hpp"
#include "quizcram/errors.hpp"
#include "quizcram/event_log.hpp"
#include "quizcram/http_api.hpp"
#include "quizcram/seek_analytics.hpp"
#include "quizcram/serialization.hpp"
#include "quizcram/study_service.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace quizcram;

namespace {

service::HttpApi* g_server = nullptr;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

int run_convert(const fs::path& input, const fs::path& output) {
    const auto manifest = convert_course(load_invideo_course(input));
    write_json_file(output, Json(manifest));
    std::cerr << "wrote " << manifest.segments.size() << " segments, " << manifest.questions.size()
              << " questions to " << output << "\n";
    return 0;
}

int run_validate(const fs::path& input) {
    const auto violations = validate_manifest(load_manifest(input));
    std::cout << canonical_json(Json{{"violations", violations}});
    return violations.empty() ? 0 : 1;
}

std::vector<analytics::VideoInfo> course_videos(const fs::path& path) {
    const Json j = read_json_file(path);
    if (j.contains("quizzes")) return analytics::videos_from_course(parse_as<InVideoQuizCourse>(j, path.string()));
    return analytics::videos_from_manifest(parse_as<CourseManifest>(j, path.string()));
}

int run_analyze(const fs::path& log_dir, const fs::path& course_file, const fs::path& out_dir,
                const analytics::AnalysisOptions& options) {
    const auto events = read_log_directory(log_dir);
    const auto report = analytics::analyze_logs(events, course_videos(course_file), options);

    fs::create_directories(out_dir);
    Json per_video = Json::object();
    for (const auto& v : report.videos) {
        per_video[v.video.video_id] = Json{{"stats", v.stats}, {"tally", v.tally}, {"quizzes", v.video.quizzes}};
        const auto fig = analytics::emit_figure_data(v.chains, v.video.quizzes);
        write_text(out_dir / (v.video.video_id + ".scatter.csv"), fig.scatter_csv);
        write_text(out_dir / (v.video.video_id + ".histogram.csv"), fig.histogram_csv);
    }
    const Json stats{{"options",
                      Json{{"merge_threshold_ms", options.merge_threshold_ms},
                           {"quiz_window_s", options.quiz_window_s},
                           {"finished_fraction", options.finished_fraction}}},
                     {"users", events.size()},
                     {"skipped_events", report.skipped_events},
                     {"overall", report.overall},
                     {"overall_tally", report.overall_tally},
                     {"videos", per_video}};
    write_json_file(out_dir / "stats.json", stats);
    std::cout << canonical_json(stats);
    return 0;
}

int run_counts(const fs::path& log_dir, const std::string& user) {
    const auto events = read_log_directory(log_dir);
    auto it = events.find(user);
    const std::vector<InteractionEvent> none;
    std::cout << canonical_json(Json(event_counts(it == events.end() ? none : it->second)));
    return 0;
}

int run_serve(const fs::path& config_path, std::optional<int> port_override) {
    auto cfg = service::ServiceConfig::load(config_path);
    if (port_override) cfg.port = *port_override;
    service::StudyService svc(cfg.scheduler, EventLog(cfg.storage_dir));
    for (const auto& f : cfg.course_files) {
        const Json j = read_json_file(f);
        CourseManifest m = j.contains("quizzes") ? convert_course(parse_as<InVideoQuizCourse>(j, f.string()))
                                                 : parse_as<CourseManifest>(j, f.string());
        svc.add_course(Course::build(std::move(m)));
    }
    service::HttpApi api(svc);
    g_server = &api;
    std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
    });
    std::cerr << "serving on " << cfg.listen_address << ":" << cfg.port << "\n";
    if (!api.listen(cfg.listen_address, cfg.port)) {
        std::cerr << "cannot listen on " << cfg.listen_address << ":" << cfg.port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quizcram: quiz-driven lecture study engine and seek-log analytics"};
    app.require_subcommand(1);

    fs::path convert_in, convert_out;
    auto* convert = app.add_subcommand("convert", "Turn an in-video-quiz course into a segment/question manifest");
    convert->add_option("input", convert_in, "In-video quiz course file")->required()->check(CLI::ExistingFile);
    convert->add_option("-o,--output", convert_out, "Manifest file to write")->required();

    fs::path validate_in;
    auto* validate = app.add_subcommand("validate", "Check a course manifest; exits 1 when it has violations");
    validate->add_option("manifest", validate_in)->required()->check(CLI::ExistingFile);

    fs::path log_dir, course_file, out_dir = "seek-report";
    analytics::AnalysisOptions options;
    auto* analyze = app.add_subcommand("analyze", "Seek-chain statistics and figure tables from event logs");
    analyze->add_option("log_dir", log_dir, "Directory of event-log files")->required()->check(CLI::ExistingDirectory);
    analyze->add_option("-c,--course", course_file, "In-video quiz course or course manifest")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("-o,--out", out_dir, "Output directory for stats.json and CSV tables")->capture_default_str();
    analyze->add_option("--merge-threshold-ms", options.merge_threshold_ms, "Seek chain merge gap")->capture_default_str()
        ->check(CLI::PositiveNumber);
    analyze->add_option("--quiz-window-s", options.quiz_window_s, "Window around quizzes")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    analyze->add_option("--finished-fraction", options.finished_fraction, "Coverage that counts as finished")->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    fs::path counts_dir;
    std::string counts_user;
    auto* counts = app.add_subcommand("counts", "Per-kind event tallies for one user");
    counts->add_option("log_dir", counts_dir)->required()->check(CLI::ExistingDirectory);
    counts->add_option("-u,--user", counts_user)->required();

    fs::path config_path;
    std::optional<int> port;
    auto* serve = app.add_subcommand("serve", "Run the study session HTTP service");
    serve->add_option("-c,--config", config_path, "Service configuration file")->required()->check(CLI::ExistingFile);
    serve->add_option("-p,--port", port, "Override the configured port");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*convert) return run_convert(convert_in, convert_out);
        if (*validate) return run_validate(validate_in);
        if (*analyze) return run_analyze(log_dir, course_file, out_dir, options);
        if (*counts) return run_counts(counts_dir, counts_user);
        if (*serve) return run_serve(config_path, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
