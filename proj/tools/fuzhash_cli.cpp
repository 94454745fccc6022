// Command-line front end: exact/fuzzy digests, sensitivity traces, and the
// train/eval/sweep experiment lifecycle. Exit codes: 0 success, 1 validation
// error, 2 runtime error.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>

#include "fuzhash/harness.hpp"

namespace fs = std::filesystem;
using namespace fuzhash;

namespace {

struct SpecFlags {
    std::string alg = "sha1";
    int rounds = -1;
    int out_bits = -1;
    int rate = -1;
    int capacity = -1;
    std::string steps;
    bool add_as_xor = false;
    bool no_feedforward = false;
    bool sha2_p_xor = false;
    std::string algebra = "unit";
    std::string variants_json;
    int domain_byte = -1;
    bool constants_preset = false;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
    cmd->add_option("--alg", f.alg,
                    "md5 | sha1 | sha2-256 | keccak1600 | keccak200-perm | "
                    "sha1-round-state | add-toy");
    cmd->add_option("--rounds", f.rounds, "round count (-1 = full)");
    cmd->add_option("--out-bits", f.out_bits, "digest length in bits");
    cmd->add_option("--rate", f.rate, "sponge rate (Keccak)");
    cmd->add_option("--capacity", f.capacity, "sponge capacity (Keccak)");
    cmd->add_option("--steps", f.steps, "comma list of theta,rho,pi,chi,iota (Keccak)");
    cmd->add_flag("--add-as-xor", f.add_as_xor, "replace modular ADD with XOR");
    cmd->add_flag("--no-feedforward", f.no_feedforward, "drop the final IV feed-forward");
    cmd->add_flag("--sha2-p-xor", f.sha2_p_xor, "XOR form of the SHA2 choice function");
    cmd->add_option("--algebra", f.algebra, "unit | circular");
    cmd->add_option("--variants", f.variants_json, "op-variant JSON object");
    cmd->add_option("--domain-byte", f.domain_byte, "Keccak padding byte (1 or 6)");
    cmd->add_flag("--constants-preset", f.constants_preset,
                  "override all constants with 0x13131313");
}

HashSpec build_spec(const SpecFlags& f) {
    nlohmann::json j{{"algorithm", f.alg}};
    if (f.rounds >= 0) j["rounds"] = f.rounds;
    if (f.out_bits >= 0) j["out_bits"] = f.out_bits;
    if (f.rate >= 0) j["rate"] = f.rate;
    if (f.capacity >= 0) j["capacity"] = f.capacity;
    j["add_as_xor"] = f.add_as_xor;
    j["keep_feedforward"] = !f.no_feedforward;
    j["sha2_p_xor"] = f.sha2_p_xor;
    j["algebra"] = f.algebra;
    if (f.domain_byte >= 0) j["domain_byte"] = f.domain_byte;
    if (!f.variants_json.empty()) j["variants"] = nlohmann::json::parse(f.variants_json);
    if (!f.steps.empty()) {
        nlohmann::json steps = nlohmann::json::array();
        std::stringstream ss(f.steps);
        std::string s;
        while (std::getline(ss, s, ',')) steps.push_back(s);
        j["steps"] = steps;
    }
    HashSpec spec = spec_from_json(j);
    if (f.constants_preset) spec.constants_override = regular_constants_preset(spec.algorithm);
    return spec;
}

struct MessageFlags {
    std::string ascii, hex, bits, fuzzy_csv;
};

void add_message_flags(CLI::App* cmd, MessageFlags& m, bool allow_fuzzy) {
    auto* a = cmd->add_option("--ascii", m.ascii, "message as ASCII text");
    auto* h = cmd->add_option("--hex", m.hex, "message as hex bytes");
    auto* b = cmd->add_option("--bits", m.bits, "message as a 01-string (LSB-first)");
    a->excludes(h)->excludes(b);
    h->excludes(b);
    if (allow_fuzzy) {
        auto* fz = cmd->add_option("--fuzzy-csv", m.fuzzy_csv,
                                   "message as comma-separated real fuzbits");
        fz->excludes(a)->excludes(h)->excludes(b);
    }
}

BitVector parse_message(const MessageFlags& m, const CLI::App* cmd) {
    if (cmd->count("--ascii")) return BitVector::from_ascii(m.ascii);
    if (cmd->count("--hex")) return BitVector::from_hex(m.hex);
    if (cmd->count("--bits")) return BitVector::from_bitstring(m.bits);
    throw CLI::ValidationError("one of --ascii/--hex/--bits is required");
}

std::vector<double> parse_csv_reals(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::string default_out_dir() {
    const char* e = std::getenv("FUZHASH_OUT_DIR");
    return e ? e : "out";
}

std::string checkpoint_path(const std::string& dir, const ExperimentConfig& cfg) {
    return dir + "/" + (cfg.name.empty() ? "experiment" : cfg.name) + ".ckpt";
}

ExperimentConfig load_cli_config(const std::string& path, uint64_t seed_override, bool has_seed,
                                 int epochs_override, bool has_epochs) {
    ExperimentConfig cfg = load_config(path);
    if (has_seed) cfg.master_seed = seed_override;
    if (has_epochs) cfg.train.epochs = epochs_override;
    cfg.validate();
    return cfg;
}

void run_train(const ExperimentConfig& cfg, const std::string& out_dir, bool quiet) {
    fs::create_directories(out_dir);
    auto res = run_experiment(cfg, [&](int e, double loss) {
        if (!quiet) std::cerr << cfg.name << " epoch " << e << " loss " << loss << "\n";
    });
    std::string stem = cfg.name.empty() ? "experiment" : cfg.name;
    save_checkpoint(checkpoint_path(out_dir, cfg), cfg, *res.model, res.trainer->optimizer());
    write_text_file(out_dir + "/" + stem + "_loss.csv", loss_csv(res.loss_history));
    write_report_files(out_dir, stem, res.report);
    if (!quiet)
        std::cerr << stem << ": avg misses " << res.report.predicted.avg << " (baseline "
                  << res.report.random_baseline.avg << "), " << res.report.exact_inversions
                  << " exact inversions, " << res.report.wall_seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fuzzy-hash laboratory"};
    app.require_subcommand(1);

    // digest
    auto* digest = app.add_subcommand("digest", "print an exact or fuzzy digest");
    SpecFlags dspec;
    MessageFlags dmsg;
    add_spec_flags(digest, dspec);
    add_message_flags(digest, dmsg, true);

    // trace
    auto* trace = app.add_subcommand("trace", "sensitivity curve of one hash bit vs one message bit");
    SpecFlags tspec;
    MessageFlags tmsg;
    int m_index = 0, h_index = 0, samples = 101;
    std::string trace_out, trace_svg;
    add_spec_flags(trace, tspec);
    add_message_flags(trace, tmsg, false);
    trace->add_option("--m-index", m_index, "message bit to sweep")->required();
    trace->add_option("--h-index", h_index, "hash bit to observe")->required();
    trace->add_option("--samples", samples, "sample count over the bit's domain");
    trace->add_option("--out", trace_out, "CSV output path (default stdout)");
    trace->add_option("--svg", trace_svg, "also write an SVG line chart");

    // train / eval / sweep
    std::string cfg_path, out_dir = default_out_dir(), ckpt_path;
    uint64_t seed = 0;
    int epochs = 0;
    bool quiet = false;

    auto* train = app.add_subcommand("train", "train a config and write checkpoint + reports");
    train->add_option("--config", cfg_path, "experiment config JSON")->required();
    train->add_option("--out", out_dir, "output directory (env FUZHASH_OUT_DIR)");
    auto* train_seed = train->add_option("--seed", seed, "master seed override");
    auto* train_epochs = train->add_option("--epochs", epochs, "epoch override");
    train->add_flag("--quiet", quiet, "suppress progress logging");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint (or train first) and write reports");
    std::string ecfg_path, eout_dir = default_out_dir(), eckpt;
    uint64_t eseed = 0;
    int eepochs = 0;
    bool equiet = false;
    eval->add_option("--config", ecfg_path, "experiment config JSON")->required();
    eval->add_option("--checkpoint", eckpt, "evaluate this checkpoint instead of training");
    eval->add_option("--out", eout_dir, "output directory (env FUZHASH_OUT_DIR)");
    auto* eval_seed = eval->add_option("--seed", eseed, "master seed override");
    auto* eval_epochs = eval->add_option("--epochs", eepochs, "epoch override");
    eval->add_flag("--quiet", equiet, "suppress progress logging");

    auto* sweep = app.add_subcommand("sweep", "run several configs sequentially");
    std::vector<std::string> sweep_cfgs;
    std::string sout_dir = default_out_dir();
    bool parallel = false, squiet = false;
    sweep->add_option("configs", sweep_cfgs, "config JSON files")->required();
    sweep->add_option("--out", sout_dir, "output directory (env FUZHASH_OUT_DIR)");
    sweep->add_flag("--parallel", parallel, "run configs concurrently");
    sweep->add_flag("--quiet", squiet, "suppress progress logging");

    CLI11_PARSE(app, argc, argv);

    try {
        if (digest->parsed()) {
            HashSpec spec = build_spec(dspec);
            if (digest->count("--fuzzy-csv")) {
                FuzVector fv;
                fv.algebra = spec.algebra;
                fv.values = parse_csv_reals(dmsg.fuzzy_csv);
                FuzVector out = fuzzy_digest(spec, fv);
                std::cout.precision(17);
                for (std::size_t i = 0; i < out.size(); ++i)
                    std::cout << out.values[i] << (i + 1 < out.size() ? "," : "\n");
            } else {
                std::cout << binary_digest(spec, parse_message(dmsg, digest)).to_hex() << "\n";
            }
        } else if (trace->parsed()) {
            HashSpec spec = build_spec(tspec);
            BitVector msg = parse_message(tmsg, trace);
            auto curve = fuzzy_sensitivity_trace(spec, msg, static_cast<std::size_t>(m_index),
                                                 static_cast<std::size_t>(h_index), samples);
            std::ostringstream csv;
            csv.precision(17);
            csv << "m,h\n";
            for (auto [m, h] : curve) csv << m << "," << h << "\n";
            if (trace_out.empty()) std::cout << csv.str();
            else write_text_file(trace_out, csv.str());
            if (!trace_svg.empty()) {
                std::vector<double> ys;
                for (auto [m, h] : curve) ys.push_back(h);
                write_text_file(trace_svg,
                                svg::line_chart(ys, "h[" + std::to_string(h_index) + "] vs m[" +
                                                        std::to_string(m_index) + "]"));
            }
        } else if (train->parsed()) {
            run_train(load_cli_config(cfg_path, seed, train_seed->count() > 0, epochs,
                                      train_epochs->count() > 0),
                      out_dir, quiet);
        } else if (eval->parsed()) {
            ExperimentConfig cfg = load_cli_config(ecfg_path, eseed, eval_seed->count() > 0,
                                                   eepochs, eval_epochs->count() > 0);
            if (!eckpt.empty()) {
                auto loaded = load_checkpoint(eckpt);
                EvalReport r = evaluate(*loaded.model, cfg);
                fs::create_directories(eout_dir);
                write_report_files(eout_dir, cfg.name.empty() ? "experiment" : cfg.name, r);
            } else {
                run_train(cfg, eout_dir, equiet);
            }
        } else if (sweep->parsed()) {
            std::vector<ExperimentConfig> cfgs;
            for (const auto& p : sweep_cfgs) cfgs.push_back(load_config(p));
            if (parallel) {
                std::vector<std::future<void>> jobs;
                for (const auto& c : cfgs)
                    jobs.push_back(std::async(std::launch::async,
                                              [&, c] { run_train(c, sout_dir, true); }));
                for (auto& j : jobs) j.get();
            } else {
                for (const auto& c : cfgs) run_train(c, sout_dir, squiet);
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
