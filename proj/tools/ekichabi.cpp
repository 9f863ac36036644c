// ekichabi: generate, check and serve a business directory over USSD and
// HTTP; report usage; benchmark the request path.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ekichabi/analytics.hpp"
#include "ekichabi/bench.hpp"
#include "ekichabi/catalog.hpp"
#include "ekichabi/directory.hpp"
#include "ekichabi/gateway.hpp"
#include "ekichabi/http_server.hpp"
#include "ekichabi/snapshot.hpp"
#include "ekichabi/sync.hpp"

namespace {

using namespace ekichabi;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// A directory file is CSV when it ends in .csv, a snapshot otherwise.
std::shared_ptr<const Catalog> load_catalog(const std::string& path) {
  if (ends_with(path, ".csv")) return Catalog::build(load_csv(path));
  return Catalog::from_snapshot(read_file(path));
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eKichabi directory service"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic directory");
  std::uint64_t gen_seed = 1;
  std::size_t gen_n = 10000;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--n", gen_n, "Number of businesses")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output file (.csv for CSV, otherwise snapshot)")->required();

  // validate
  auto* validate = app.add_subcommand("validate", "Check a directory CSV");
  std::string validate_csv;
  validate->add_option("--csv", validate_csv, "CSV file")->required()->check(CLI::ExistingFile);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the USSD gateway and sync endpoints");
  std::string serve_snapshot, serve_whitelist, serve_hitlog, serve_actions = "actions.tsv",
                                                              serve_disclaimers, serve_strings,
                                                              serve_ui, serve_host = "0.0.0.0",
                                                              serve_token;
  int serve_port = 8080;
  std::size_t serve_capacity = 20000;
  bool serve_no_cache = false;
  serve->add_option("--snapshot", serve_snapshot, "Directory snapshot (or .csv)")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--whitelist", serve_whitelist, "Allowed phone numbers, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--port", serve_port, "Listen port (0 for any)");
  serve->add_option("--host", serve_host, "Listen address");
  serve->add_option("--cache-capacity", serve_capacity, "Screen cache entries");
  serve->add_flag("--no-cache", serve_no_cache, "Disable the screen cache and indexes");
  serve->add_option("--hitlog", serve_hitlog, "Append USSD hits here");
  serve->add_option("--actions", serve_actions, "Append ingested client actions here");
  serve->add_option("--disclaimers", serve_disclaimers, "Persist disclaimer flags here");
  serve->add_option("--strings", serve_strings, "Screen text overrides (key=value)")
      ->check(CLI::ExistingFile);
  serve->add_option("--ui-dir", serve_ui, "Static files served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--admin-token", serve_token, "Required X-Admin-Token for /admin");

  // report
  auto* report = app.add_subcommand("report", "Usage metrics as JSON");
  std::string report_hitlog, report_actions, report_demo, report_out;
  report->add_option("--hitlog", report_hitlog, "USSD hit log")->required()->check(CLI::ExistingFile);
  report->add_option("--actions", report_actions, "Client action store")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--demographics", report_demo, "CSV keyed by phone number")
      ->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output JSON (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Time random walks through the gateway");
  std::string bench_snapshot, bench_mode = "both", bench_out;
  WalkOptions walk;
  bench->add_option("--snapshot", bench_snapshot, "Directory snapshot (or .csv)")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--walks", walk.walks, "Number of walks");
  bench->add_option("--mode", bench_mode, "on, off or both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  bench->add_option("--seed", walk.seed, "Walk RNG seed");
  bench->add_option("--max-steps", walk.max_steps, "Inputs per walk at most");
  bench->add_option("--out", bench_out, "Output JSON (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Directory d = generate_synthetic(gen_seed, gen_n);
      if (ends_with(gen_out, ".csv")) {
        write_file(gen_out, to_csv(d));
      } else {
        write_file(gen_out, encode_snapshot(d));
      }
      std::cout << "wrote " << d.size() << " businesses, version " << version_of(d) << "\n";
    } else if (*validate) {
      try {
        Directory d = load_csv(validate_csv);
        std::cout << "ok: " << d.size() << " businesses, version " << version_of(d) << "\n";
      } catch (const CsvError& e) {
        std::cerr << validate_csv << ": row " << e.row() << ", column '" << e.column()
                  << "': " << e.what() << "\n";
        return 1;
      }
    } else if (*serve) {
      GatewayOptions options;
      options.cache = !serve_no_cache;
      options.cache_capacity = serve_capacity;
      if (!serve_strings.empty()) options.strings = Strings::from_file(serve_strings);
      std::shared_ptr<LineSink> hit_sink = serve_hitlog.empty()
                                               ? std::shared_ptr<LineSink>(new NullSink)
                                               : std::make_shared<FileSink>(serve_hitlog);
      auto disclaimers = serve_disclaimers.empty()
                             ? std::make_shared<DisclaimerStore>()
                             : std::make_shared<DisclaimerStore>(serve_disclaimers);
      GatewayService gateway(load_catalog(serve_snapshot), Whitelist::from_file(serve_whitelist),
                             options, nullptr, std::make_shared<HitLog>(hit_sink), disclaimers);
      SyncService sync(gateway, std::make_shared<FileSink>(serve_actions));
      HttpOptions http;
      http.host = serve_host;
      http.port = serve_port;
      http.admin_token = serve_token;
      if (!serve_ui.empty()) http.ui_dir = serve_ui;
      HttpServer server(gateway, sync, http);
      const int port = server.bind();
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "serving version " << gateway.version() << " on " << serve_host << ":" << port
                << (serve_no_cache ? " (no cache)" : "") << std::endl;
      server.serve();
      g_server = nullptr;
      gateway.hits().flush();
    } else if (*report) {
      auto r = build_report_files(report_hitlog, report_actions, report_demo);
      const std::string text = to_json(r).dump(2) + "\n";
      if (report_out.empty()) {
        std::cout << text;
      } else {
        write_file(report_out, text);
      }
      if (r.warnings) std::cerr << "skipped " << r.warnings << " malformed lines\n";
    } else if (*bench) {
      auto result = run_bench(load_catalog(bench_snapshot), *parse_bench_mode(bench_mode), walk);
      const std::string text = to_json(result).dump(2) + "\n";
      if (bench_out.empty()) {
        std::cout << text;
      } else {
        write_file(bench_out, text);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
