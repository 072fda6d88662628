// oolink: link-level simulator for OFDM reception with an overclocked ADC.
// Subcommands: sweep (Monte-Carlo experiment engine), single (one trial with
// diagnostic dumps), plot (SVG charts from report CSVs), replay (decode a
// recorded sample file).

#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "oolink/harness.hpp"
#include "oolink/sample_io.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace oolink;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::atomic<bool> g_stop{false};
void on_sigint(int) { g_stop.store(true); }

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(f);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

void apply_overrides(json& cfg, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got: " + kv);
        std::string key = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        try {
            cfg[key] = json::parse(val);
        } catch (...) {
            cfg[key] = val;  // plain string value
        }
    }
}

uint64_t resolve_seed(const json& cfg, int64_t flag_seed) {
    if (flag_seed >= 0) return static_cast<uint64_t>(flag_seed);
    if (cfg.contains("seed")) return cfg["seed"].get<uint64_t>();
    if (const char* env = std::getenv("OO_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

SweepSpec spec_from_config(const json& cfg, uint64_t seed) {
    for (const char* key : {"snr_db", "G", "mcs"})
        if (!cfg.contains(key))
            throw ConfigError(std::string("missing required config key \"") + key + "\"");

    SweepSpec spec;
    spec.snr_db = cfg["snr_db"].get<std::vector<double>>();
    spec.g_list = cfg["G"].get<std::vector<int>>();
    for (const auto& m : cfg["mcs"].get<std::vector<std::string>>())
        spec.mcs_list.push_back(parse_mcs(m));
    spec.seed = seed;
    spec.trials = cfg.value("trials", 3000);
    spec.packet_len = cfg.value("packet_len", 100);
    spec.cfo_hz = cfg.value("cfo_hz", 0.0);
    spec.timing_pad_base = cfg.value("timing_pad", 400);
    spec.genie_sync = cfg.value("genie_sync", false);
    spec.jobs = cfg.value("jobs", 0);
    spec.rx.isi_shift = cfg.value("isi_shift", true);
    spec.rx.detect.threshold = cfg.value("detect_threshold", spec.rx.detect.threshold);
    spec.rx.clock_switch_s = cfg.value("clock_switch_us", 8.0) * 1e-6;
    std::string mode = cfg.value("noise_map_mode", "equalized");
    if (mode == "raw")
        spec.rx.map_mode = NoiseMapMode::RawDeviation;
    else if (mode == "equalized")
        spec.rx.map_mode = NoiseMapMode::EqualizedResidual;
    else
        throw ConfigError("unknown noise_map_mode: " + mode);
    std::string nm = cfg.value("noise_model", "white");
    if (nm == "white")
        spec.noise_model = NoiseModel::WhitePerSample;
    else if (nm == "bandlimited")
        spec.noise_model = NoiseModel::BandLimited;
    else
        throw ConfigError("unknown noise_model: " + nm);
    if (cfg.contains("receivers")) {
        spec.receivers.clear();
        for (const auto& r : cfg["receivers"].get<std::vector<std::string>>())
            spec.receivers.push_back(parse_receiver(r));
    }
    if (cfg.contains("taps")) {
        spec.taps.clear();
        for (const auto& t : cfg["taps"]) {
            if (!t.is_array() || t.size() != 3)
                throw ConfigError("taps entries must be [delay, re, im]");
            spec.taps.push_back({t[0].get<int>(), cxd(t[1].get<double>(), t[2].get<double>())});
        }
    }
    if (spec.snr_db.empty() || spec.g_list.empty() || spec.mcs_list.empty())
        throw ConfigError("sweep axes must be non-empty");
    return spec;
}

json effective_config(const json& cfg, const SweepSpec& spec) {
    json out = cfg;
    out["seed"] = spec.seed;
    out["trials"] = spec.trials;
    out["packet_len"] = spec.packet_len;
    return out;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets,
              int64_t flag_seed, int flag_jobs, std::string out_dir) {
    json cfg = load_config(config_path);
    apply_overrides(cfg, sets);
    uint64_t seed = resolve_seed(cfg, flag_seed);
    SweepSpec spec = spec_from_config(cfg, seed);
    if (flag_jobs > 0) spec.jobs = flag_jobs;
    if (out_dir.empty()) out_dir = cfg.value("out_dir", "out");

    FrameConfig frame_cfg = FrameConfig::ieee80211ah_2mhz();
    fs::create_directories(out_dir);

    std::signal(SIGINT, on_sigint);
    SweepReport report = run_sweep(spec, frame_cfg, &g_stop,
                                   [](const std::string& msg) { std::cerr << msg << "\n"; });

    const std::string report_path = out_dir + "/" + cfg.value("report", std::string("sweep.csv"));
    std::ofstream rf(report_path);
    rf << sweep_report_to_csv(report);
    rf.close();
    std::cout << "report: " << report_path << " (" << report.rows.size() << " rows)\n";

    if (cfg.contains("target_prr")) {
        PowerSavingsReport power = power_savings(report, cfg["target_prr"].get<double>());
        const std::string power_path =
            out_dir + "/" + cfg.value("power_report", std::string("power.csv"));
        std::ofstream pf(power_path);
        pf << power_report_to_csv(power);
        std::cout << "power report: " << power_path << "\n";
    }

    std::ofstream ef(out_dir + "/effective_config.json");
    ef << effective_config(cfg, spec).dump(2) << "\n";

    if (g_stop.load()) {
        std::cerr << "interrupted; partial results flushed\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_single(const std::string& config_path, const std::vector<std::string>& sets,
               int64_t flag_seed, const std::string& dump_corr, const std::string& dump_xcorr,
               const std::string& dump_copies, const std::string& dump_stream) {
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    apply_overrides(cfg, sets);
    uint64_t seed = resolve_seed(cfg, flag_seed);

    FrameConfig frame_cfg = FrameConfig::ieee80211ah_2mhz();
    Mcs mcs = parse_mcs(cfg.value("mcs_single", cfg.value("mcs_one", std::string("qpsk"))));
    const int g = cfg.value("G_single", cfg.value("g", 8));
    const double snr = cfg.value("snr", kInfSnrDb);
    const int payload_len = cfg.value("packet_len", 100);

    Rng rng(derive_seed(seed, {0x51u}));
    std::vector<uint8_t> payload(payload_len);
    for (auto& b : payload) b = static_cast<uint8_t>(rng.next_u64() & 0xFF);
    Frame frame = assemble_frame(payload, mcs, frame_cfg);

    ChannelConfig ch;
    ch.oversampling = g;
    ch.snr_db = snr;
    ch.cfo_hz = cfg.value("cfo_hz", 0.0);
    ch.timing_pad = cfg.value("timing_pad", 400) * g;
    ch.seed = derive_seed(seed, {0x52u});
    ChannelOutput out = run_channel(frame, ch, frame_cfg);

    RxOptions rx;
    rx.keep_traces = true;
    rx.isi_shift = cfg.value("isi_shift", true);
    DecodeResult res = decode_frame_tfi(out.rx, mcs, payload_len, frame_cfg, g, rx);

    long bit_errors = 0;
    for (std::size_t i = 0; i < frame.meta.info_bits.size(); ++i)
        bit_errors += res.info_bits[i] != frame.meta.info_bits[i];

    std::cout << "detected=" << (res.detected ? "true" : "false")
              << " sync_ok=" << (res.sync_ok ? "true" : "false")
              << " symbol_start=" << res.sync.symbol_start
              << " cfo_coarse_hz=" << res.cfo.coarse_hz << " cfo_fine_hz=" << res.cfo.fine_hz
              << " bit_errors=" << bit_errors << "/" << frame.meta.info_bits.size()
              << " crc_ok=" << (res.crc_ok ? "true" : "false") << "\n";

    if (!dump_corr.empty()) {
        std::ofstream f(dump_corr);
        f << "lag,metric\n";
        for (std::size_t k = 0; k < res.detection.metric_trace.size(); ++k)
            f << k << "," << res.detection.metric_trace[k] << "\n";
    }
    if (!dump_xcorr.empty()) {
        std::ofstream f(dump_xcorr);
        f << "lag,metric\n";
        for (const auto& [lag, m] : res.sync.trace) f << lag << "," << m << "\n";
    }
    if (!dump_copies.empty()) {
        std::ofstream f(dump_copies);
        f << "symbol,subcarrier,copy,re,im,decision\n";
        for (std::size_t s = 0; s < res.copies_dump.size(); ++s) {
            const SymbolCopies& sc = res.copies_dump[s];
            for (std::size_t i = 0; i < frame_cfg.data_subcarriers.size(); ++i) {
                const int k = frame_cfg.data_subcarriers[i];
                const int b = frame_cfg.bin(k);
                for (int q = 0; q < sc.g; ++q)
                    f << s << "," << k << "," << q << "," << sc.bins[q][b].real() << ","
                      << sc.bins[q][b].imag() << "," << res.decisions[s][i] << "\n";
            }
        }
    }
    if (!dump_stream.empty()) {
        write_stream_f32(dump_stream, out.rx);
        StreamMeta meta;
        meta.mcs = mcs_name(mcs);
        meta.payload_len = payload_len;
        meta.seed = seed;
        meta.oversampling = g;
        meta.rate_hz = out.rx.rate_hz;
        write_stream_meta(dump_stream + ".json", meta);
    }
    return res.crc_ok ? kExitOk : kExitRuntime;
}

int cmd_replay(const std::string& sample_path, const std::string& meta_path) {
    std::string mp = meta_path.empty() ? sample_path + ".json" : meta_path;
    StreamMeta meta = read_stream_meta(mp);
    SampleStream stream = read_stream_f32(sample_path, meta.rate_hz);
    if (stream.size() < 480u * meta.oversampling)
        throw std::runtime_error("sample file too short for one frame");

    FrameConfig frame_cfg = FrameConfig::ieee80211ah_2mhz();
    Mcs mcs = parse_mcs(meta.mcs);
    DecodeResult res = decode_frame_tfi(stream, mcs, meta.payload_len, frame_cfg,
                                        meta.oversampling, RxOptions{});
    std::cout << "detected=" << (res.detected ? "true" : "false")
              << " crc_ok=" << (res.crc_ok ? "true" : "false")
              << " payload_len=" << meta.payload_len << " mcs=" << meta.mcs << "\n";
    return res.crc_ok ? kExitOk : kExitRuntime;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open csv: " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

int cmd_plot(const std::string& csv_path, const std::string& kind, std::string out_path) {
    CsvTable t = read_csv(csv_path);
    const bool power_kind = kind == "power";
    const std::string want = power_kind ? power_csv_header() : sweep_csv_header();
    std::string have;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        have += (i ? "," : "") + t.header[i];
    if (have != want) throw ConfigError("csv schema mismatch for kind " + kind);
    if (t.rows.empty()) throw ConfigError("csv has no data rows");

    if (out_path.empty()) out_path = kind + ".svg";
    std::map<std::string, plot::Series> series;

    if (power_kind) {
        for (const auto& r : t.rows) {
            if (r[5] == "unreachable") continue;
            series[r[0]].label = r[0];
            series[r[0]].points.push_back({std::stod(r[1]), std::stod(r[5])});
        }
        plot::ChartSpec spec{"TX power savings vs oversampling", "G", "savings fraction",
                             false, 0.0, 1.0};
        std::vector<plot::Series> list;
        for (auto& [k, s] : series) list.push_back(s);
        plot::write_svg(out_path, spec, list);
        std::cout << "wrote " << out_path << "\n";
        return kExitOk;
    }

    int ycol;
    plot::ChartSpec spec;
    if (kind == "ber") {
        ycol = 9;
        spec = {"BER vs SNR", "SNR (dB)", "BER", true, std::nan(""), std::nan("")};
    } else if (kind == "prr") {
        ycol = 12;
        spec = {"PRR vs SNR", "SNR (dB)", "PRR", false, 0.0, 1.0};
    } else if (kind == "sync") {
        ycol = 13;
        spec = {"Timing error vs SNR", "SNR (dB)", "mean |error| (base samples)", false,
                std::nan(""), std::nan("")};
    } else {
        throw ConfigError("unknown plot kind: " + kind + " (ber|prr|sync|power)");
    }

    for (const auto& r : t.rows) {
        std::string key = r[0] + " " + r[1] + (r[2] != "none" ? ":" + r[2] : "") + " G=" + r[3];
        series[key].label = key;
        series[key].points.push_back({std::stod(r[5]), std::stod(r[ycol])});
    }
    std::vector<plot::Series> list;
    for (auto& [k, s] : series) {
        std::sort(s.points.begin(), s.points.end());
        list.push_back(s);
    }
    plot::write_svg(out_path, spec, list);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oolink: OFDM link simulator with an overclocked receiver"};
    app.require_subcommand(1);

    std::string config_path, out_dir, kind, csv_path, out_path, sample_path, meta_path;
    std::string dump_corr, dump_xcorr, dump_copies, dump_stream;
    std::vector<std::string> sets;
    int64_t flag_seed = -1;
    int flag_jobs = 0;

    auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a config file");
    sweep->add_option("config", config_path, "JSON config")->required();
    sweep->add_option("--set", sets, "override a config key: --set key=value");
    sweep->add_option("--seed", flag_seed, "RNG seed override");
    sweep->add_option("--jobs", flag_jobs, "worker threads");
    sweep->add_option("--out-dir", out_dir, "output directory");

    auto* single = app.add_subcommand("single", "one TX->channel->RX run with diagnostics");
    single->add_option("config", config_path, "JSON config (optional)");
    single->add_option("--set", sets, "override a config key");
    single->add_option("--seed", flag_seed, "RNG seed override");
    single->add_option("--dump-corr", dump_corr, "detection auto-correlation CSV");
    single->add_option("--dump-xcorr", dump_xcorr, "sync cross-correlation CSV");
    single->add_option("--dump-copies", dump_copies, "per-copy constellation CSV");
    single->add_option("--dump-stream", dump_stream, "record the received stream (f32 + sidecar)");

    auto* plotc = app.add_subcommand("plot", "render a report CSV to SVG");
    plotc->add_option("csv", csv_path, "report CSV")->required();
    plotc->add_option("kind", kind, "ber|prr|sync|power")->required();
    plotc->add_option("--out", out_path, "output SVG path");

    auto* replay = app.add_subcommand("replay", "decode a recorded float32 sample file");
    replay->add_option("file", sample_path, "interleaved float32 (re,im) file")->required();
    replay->add_option("--meta", meta_path, "sidecar JSON (default: <file>.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sweep) return cmd_sweep(config_path, sets, flag_seed, flag_jobs, out_dir);
        if (*single)
            return cmd_single(config_path, sets, flag_seed, dump_corr, dump_xcorr, dump_copies,
                              dump_stream);
        if (*plotc) return cmd_plot(csv_path, kind, out_path);
        if (*replay) return cmd_replay(sample_path, meta_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::string what = e.what();
        if (what.find("malformed") != std::string::npos ||
            what.find("cannot open") != std::string::npos ||
            what.find("too short") != std::string::npos) {
            std::cerr << "error: " << what << "\n";
            return kExitConfig;
        }
        std::cerr << "error: " << what << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
