#ifndef FUZHASH_HARNESS_HPP
#define FUZHASH_HARNESS_HPP

#include <chrono>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzhash/fuzops.hpp"
#include "fuzhash/train.hpp"

namespace fuzhash {

/// Everything needed to reproduce one experiment end to end.
struct ExperimentConfig {
    std::string name;
    HashSpec spec;
    MaskSpec mask;           // empty -> full digest
    int message_bits = -1;   // -1 -> algorithm-fixed length (error if arbitrary)
    std::vector<int> hidden_sizes{1024};
    OutputActivation output_activation = OutputActivation::SIGMOID;
    bool batch_norm = true;
    bool bn_before_activation = false;
    TrainConfig train;
    int test_set_size = 1024;
    uint64_t master_seed = 1;

    int effective_message_bits() const {
        if (message_bits > 0) return message_bits;
        int f = spec.fixed_message_bits();
        if (f < 0)
            throw std::invalid_argument("ExperimentConfig: message_bits required for " +
                                        to_string(spec.algorithm));
        return f;
    }

    MaskSpec effective_mask() const {
        return mask.indices.empty() ? MaskSpec::full(spec.effective_out_bits()) : mask;
    }

    void validate() const {
        spec.validate();
        train.validate();
        effective_mask().validate(spec.effective_out_bits());
        if (effective_message_bits() < 1)
            throw std::invalid_argument("ExperimentConfig: message_bits must be >= 1");
        int f = spec.fixed_message_bits();
        if (f > 0 && message_bits > 0 && message_bits != f)
            throw std::invalid_argument("ExperimentConfig: message_bits conflicts with algorithm");
        if (test_set_size < 1)
            throw std::invalid_argument("ExperimentConfig: test_set_size must be >= 1");
    }

    MlpConfig mlp_config() const {
        MlpConfig m;
        m.input_size = spec.effective_out_bits();
        m.hidden_sizes = hidden_sizes;
        m.output_size = effective_message_bits();
        m.output_activation = output_activation;
        m.batch_norm = batch_norm;
        m.bn_before_activation = bn_before_activation;
        auto rng = derive_rng(master_seed, RngStream::WEIGHT_INIT);
        m.init_seed = rng();
        return m;
    }
};

struct MissStats {
    double avg = 0.0;
    int min = 0;
    int max = 0;
    std::vector<long> histogram;      // index = total misses, size |mask|+1
    std::vector<double> per_bit_freq; // per hash bit; zero outside the mask
};

struct EvalReport {
    MissStats predicted;
    MissStats random_baseline;
    long exact_inversions = 0;
    std::vector<double> loss_history;
    nlohmann::json config_echo;
    double wall_seconds = 0.0;  // kept out of the canonical JSON (see report_to_json)
};

// --- config JSON ---

inline nlohmann::json to_json(const TrainConfig& t) {
    static const char* losses[] = {"l1", "bce", "circular"};
    static const char* modes[] = {"hashes", "random-strings", "single-hash"};
    nlohmann::json j{{"samples_per_epoch", t.samples_per_epoch},
                     {"batch_size", t.batch_size},
                     {"epochs", t.epochs},
                     {"learning_rate", t.learning_rate},
                     {"loss", losses[static_cast<int>(t.loss)]},
                     {"binarization_penalty", t.binarization_penalty_weight},
                     {"input_mode", modes[static_cast<int>(t.input_mode)]},
                     {"fresh_samples_per_epoch", t.fresh_samples_per_epoch},
                     {"nesterov", t.nesterov},
                     {"grad_clip", t.grad_clip},
                     {"circular_embedding",
                      t.circular_embedding == CircularEmbedding::DIRECT ? "direct" : "affine"}};
    if (t.input_mode == InputMode::SINGLE_HASH) j["single_hash"] = t.single_hash_hex;
    return j;
}

inline TrainConfig train_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"samples_per_epoch", "batch_size", "epochs", "learning_rate", "loss",
         "binarization_penalty", "input_mode", "single_hash", "fresh_samples_per_epoch",
         "nesterov", "grad_clip", "circular_embedding"},
        "train");
    TrainConfig t;
    t.samples_per_epoch = j.value("samples_per_epoch", 1024);
    t.batch_size = j.value("batch_size", 64);
    t.epochs = j.value("epochs", 0);
    t.learning_rate = j.value("learning_rate", 0.002);
    std::string loss = j.value("loss", "l1");
    if (loss == "l1") t.loss = LossKind::L1;
    else if (loss == "bce") t.loss = LossKind::BCE;
    else if (loss == "circular") t.loss = LossKind::CIRCULAR_ANGULAR;
    else throw std::invalid_argument("train: unknown loss '" + loss + "'");
    t.binarization_penalty_weight = j.value("binarization_penalty", 0.0);
    std::string mode = j.value("input_mode", "hashes");
    if (mode == "hashes") t.input_mode = InputMode::HASHES;
    else if (mode == "random-strings") t.input_mode = InputMode::RANDOM_STRINGS;
    else if (mode == "single-hash") t.input_mode = InputMode::SINGLE_HASH;
    else throw std::invalid_argument("train: unknown input_mode '" + mode + "'");
    t.single_hash_hex = j.value("single_hash", std::string{});
    t.fresh_samples_per_epoch = j.value("fresh_samples_per_epoch", true);
    t.nesterov = j.value("nesterov", true);
    t.grad_clip = j.value("grad_clip", 0.0);
    std::string emb = j.value("circular_embedding", "direct");
    if (emb == "direct") t.circular_embedding = CircularEmbedding::DIRECT;
    else if (emb == "affine") t.circular_embedding = CircularEmbedding::AFFINE;
    else throw std::invalid_argument("train: unknown circular_embedding '" + emb + "'");
    return t;
}

inline nlohmann::json to_json(const MaskSpec& m) { return nlohmann::json(m.indices); }

inline MaskSpec mask_from_json(const nlohmann::json& j, int out_bits) {
    if (j.is_string()) {
        if (j.get<std::string>() == "full") return MaskSpec::full(out_bits);
        throw std::invalid_argument("mask: unknown mask string");
    }
    if (j.is_object()) {
        detail::reject_unknown_keys(j, {"range", "indices"}, "mask");
        if (j.contains("range")) {
            auto r = j.at("range").get<std::vector<int>>();
            if (r.size() != 2) throw std::invalid_argument("mask: range needs [first, last]");
            return MaskSpec::range(r[0], r[1]);
        }
        MaskSpec m;
        m.indices = j.at("indices").get<std::vector<int>>();
        return m;
    }
    MaskSpec m;
    m.indices = j.get<std::vector<int>>();
    return m;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    static const char* acts[] = {"sigmoid", "hard-sigmoid"};
    return {{"name", c.name},
            {"spec", to_json(c.spec)},
            {"mask", to_json(c.effective_mask())},
            {"message_bits", c.effective_message_bits()},
            {"mlp",
             {{"hidden", c.hidden_sizes},
              {"output_activation", acts[static_cast<int>(c.output_activation)]},
              {"batch_norm", c.batch_norm},
              {"bn_before_activation", c.bn_before_activation}}},
            {"train", to_json(c.train)},
            {"test_set_size", c.test_set_size},
            {"seed", c.master_seed}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"name", "spec", "mask", "message_bits", "mlp", "train", "test_set_size", "seed"},
        "config");
    ExperimentConfig c;
    c.name = j.value("name", std::string{});
    c.spec = spec_from_json(j.at("spec"));
    if (j.contains("mask")) c.mask = mask_from_json(j.at("mask"), c.spec.effective_out_bits());
    c.message_bits = j.value("message_bits", -1);
    if (j.contains("mlp")) {
        const auto& m = j.at("mlp");
        detail::reject_unknown_keys(
            m, {"hidden", "output_activation", "batch_norm", "bn_before_activation"}, "mlp");
        c.hidden_sizes = m.value("hidden", std::vector<int>{1024});
        std::string act = m.value("output_activation", "sigmoid");
        if (act == "sigmoid") c.output_activation = OutputActivation::SIGMOID;
        else if (act == "hard-sigmoid") c.output_activation = OutputActivation::HARD_SIGMOID;
        else throw std::invalid_argument("mlp: unknown output_activation '" + act + "'");
        c.batch_norm = m.value("batch_norm", true);
        c.bn_before_activation = m.value("bn_before_activation", false);
    }
    if (j.contains("train")) c.train = train_from_json(j.at("train"));
    c.test_set_size = j.value("test_set_size", 1024);
    c.master_seed = j.value("seed", uint64_t{1});
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    f >> j;
    return config_from_json(j);
}

// --- evaluation ---

namespace detail {

inline BitVector draw_target(const HashSpec& spec, InputMode mode, const BitVector& single_hash,
                             int message_bits, std::mt19937_64& rng) {
    switch (mode) {
        case InputMode::HASHES:
            return binary_digest(spec, random_bits(rng, message_bits));
        case InputMode::RANDOM_STRINGS:
            return random_bits(rng, spec.effective_out_bits());
        case InputMode::SINGLE_HASH:
            return single_hash;
    }
    throw std::logic_error("draw_target: bad input mode");
}

inline MissStats finalize_stats(const std::vector<int>& misses,
                                const std::vector<long>& bit_miss_counts, std::size_t mask_size) {
    MissStats s;
    s.histogram.assign(mask_size + 1, 0);
    long total = 0;
    s.min = static_cast<int>(mask_size);
    s.max = 0;
    for (int m : misses) {
        total += m;
        s.min = std::min(s.min, m);
        s.max = std::max(s.max, m);
        ++s.histogram[static_cast<std::size_t>(m)];
    }
    s.avg = static_cast<double>(total) / static_cast<double>(misses.size());
    s.per_bit_freq.resize(bit_miss_counts.size());
    for (std::size_t i = 0; i < bit_miss_counts.size(); ++i)
        s.per_bit_freq[i] =
            static_cast<double>(bit_miss_counts[i]) / static_cast<double>(misses.size());
    return s;
}

}  // namespace detail

inline int count_misses(const BitVector& a, const BitVector& b, const MaskSpec& mask) {
    if (a.size() != b.size()) throw std::invalid_argument("count_misses: length mismatch");
    int n = 0;
    for (int j : mask.indices)
        if (a[static_cast<std::size_t>(j)] != b[static_cast<std::size_t>(j)]) ++n;
    return n;
}

/// The 1024-message testing protocol: true hashes in, rounded predicted
/// messages re-hashed exactly, masked misses counted, with a pairwise
/// random-message baseline against the same true hashes.
inline EvalReport evaluate(Mlp& model, const ExperimentConfig& cfg) {
    cfg.validate();
    const int k = cfg.spec.effective_out_bits();
    const int mb = cfg.effective_message_bits();
    const int n = cfg.test_set_size;
    MaskSpec mask = cfg.effective_mask();
    auto t0 = std::chrono::steady_clock::now();

    BitVector single_hash;
    if (cfg.train.input_mode == InputMode::SINGLE_HASH)
        single_hash = BitVector::from_hex(cfg.train.single_hash_hex);

    auto test_rng = derive_rng(cfg.master_seed, RngStream::TEST_DATA);
    auto baseline_rng = derive_rng(cfg.master_seed, RngStream::BASELINE);

    std::vector<BitVector> targets(n);
    Eigen::MatrixXd x(k, n);
    for (int col = 0; col < n; ++col) {
        targets[col] =
            detail::draw_target(cfg.spec, cfg.train.input_mode, single_hash, mb, test_rng);
        for (int i = 0; i < k; ++i) x(i, col) = targets[col][i];
    }
    Eigen::MatrixXd y = model.forward(x, false);

    std::vector<int> pred_misses(n), base_misses(n);
    std::vector<long> pred_bits(k, 0), base_bits(k, 0);
    long exact = 0;
    FuzVector fuzmsg;
    fuzmsg.algebra = cfg.spec.algebra;
    fuzmsg.values.resize(mb);
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < mb; ++i) fuzmsg.values[i] = y(i, col);
        BitVector msg = round_to_bin(fuzmsg);
        BitVector h_pred = binary_digest(cfg.spec, msg);
        int m = 0;
        for (int j : mask.indices)
            if (h_pred[j] != targets[col][j]) {
                ++m;
                ++pred_bits[j];
            }
        pred_misses[col] = m;
        if (m == 0) ++exact;

        BitVector h_rand = binary_digest(cfg.spec, random_bits(baseline_rng, mb));
        m = 0;
        for (int j : mask.indices)
            if (h_rand[j] != targets[col][j]) {
                ++m;
                ++base_bits[j];
            }
        base_misses[col] = m;
    }

    EvalReport r;
    r.predicted = detail::finalize_stats(pred_misses, pred_bits, mask.size());
    r.random_baseline = detail::finalize_stats(base_misses, base_bits, mask.size());
    r.exact_inversions = exact;
    r.config_echo = to_json(cfg);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct ExperimentResult {
    std::unique_ptr<Mlp> model;
    std::unique_ptr<Trainer> trainer;  // kept alive so its optimizer can be checkpointed
    std::vector<double> loss_history;
    EvalReport report;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Full lifecycle: init -> train for cfg.train.epochs -> evaluate.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const EpochCallback& on_epoch = {}) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.model = std::make_unique<Mlp>(cfg.mlp_config());
    res.trainer = std::make_unique<Trainer>(*res.model, cfg.spec, cfg.effective_mask(),
                                            cfg.effective_message_bits(), cfg.train,
                                            cfg.master_seed);
    for (int e = 0; e < cfg.train.epochs; ++e) {
        double loss = res.trainer->train_epoch();
        res.loss_history.push_back(loss);
        if (on_epoch) on_epoch(e, loss);
    }
    res.report = evaluate(*res.model, cfg);
    res.report.loss_history = res.loss_history;
    res.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// --- report emission ---

/// Canonical report JSON. Wall-clock time is deliberately excluded so that
/// reruns with the same seed produce byte-identical files; pass
/// include_timing=true for human-facing copies.
inline nlohmann::json report_to_json(const EvalReport& r, bool include_timing = false) {
    auto stats = [](const MissStats& s) {
        return nlohmann::json{{"avg", s.avg},
                              {"min", s.min},
                              {"max", s.max},
                              {"histogram", s.histogram},
                              {"per_bit_freq", s.per_bit_freq}};
    };
    nlohmann::json j{{"predicted", stats(r.predicted)},
                     {"random_baseline", stats(r.random_baseline)},
                     {"exact_inversions", r.exact_inversions},
                     {"loss_history", r.loss_history},
                     {"config", r.config_echo}};
    if (include_timing) j["wall_seconds"] = r.wall_seconds;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

inline std::string loss_csv(const std::vector<double>& history) {
    std::ostringstream os;
    os << "epoch,loss\n";
    os.precision(17);
    for (std::size_t i = 0; i < history.size(); ++i) os << i << "," << history[i] << "\n";
    return os.str();
}

inline std::string histogram_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "misses,predicted_count,baseline_count\n";
    for (std::size_t i = 0; i < r.predicted.histogram.size(); ++i)
        os << i << "," << r.predicted.histogram[i] << "," << r.random_baseline.histogram[i]
           << "\n";
    return os.str();
}

inline std::string per_bit_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "bit,predicted_freq,baseline_freq\n";
    os.precision(17);
    for (std::size_t i = 0; i < r.predicted.per_bit_freq.size(); ++i)
        os << i << "," << r.predicted.per_bit_freq[i] << "," << r.random_baseline.per_bit_freq[i]
           << "\n";
    return os.str();
}

// --- minimal SVG charts ---

namespace svg {

inline std::string line_chart(const std::vector<double>& ys, const std::string& title,
                              int width = 640, int height = 360) {
    double lo = 0.0, hi = 1.0;
    if (!ys.empty()) {
        lo = *std::min_element(ys.begin(), ys.end());
        hi = *std::max_element(ys.begin(), ys.end());
        if (hi <= lo) hi = lo + 1.0;
    }
    const double mx = 50, my = 30;
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
       << title << "</text>\n";
    if (ys.size() > 1) {
        os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < ys.size(); ++i) {
            double px = mx + (width - 2 * mx) * static_cast<double>(i) / (ys.size() - 1);
            double py = height - my - (height - 2 * my) * (ys[i] - lo) / (hi - lo);
            os << px << "," << py << " ";
        }
        os << "\"/>\n";
    }
    os << "<text x=\"8\" y=\"" << my << "\" font-size=\"11\">" << hi << "</text>\n"
       << "<text x=\"8\" y=\"" << height - my << "\" font-size=\"11\">" << lo << "</text>\n"
       << "</svg>\n";
    return os.str();
}

inline std::string bar_chart(const std::vector<double>& ys, const std::string& title,
                             int width = 640, int height = 360) {
    double hi = 1.0;
    if (!ys.empty()) hi = std::max(1e-12, *std::max_element(ys.begin(), ys.end()));
    const double mx = 50, my = 30;
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
       << title << "</text>\n";
    if (!ys.empty()) {
        double bw = (width - 2 * mx) / static_cast<double>(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            double bh = (height - 2 * my) * ys[i] / hi;
            os << "<rect x=\"" << mx + bw * i << "\" y=\"" << height - my - bh << "\" width=\""
               << std::max(0.5, bw - 1.0) << "\" height=\"" << bh << "\" fill=\"steelblue\"/>\n";
        }
    }
    os << "<text x=\"8\" y=\"" << my << "\" font-size=\"11\">" << hi << "</text>\n</svg>\n";
    return os.str();
}

}  // namespace svg

inline void write_report_files(const std::string& dir, const std::string& stem,
                               const EvalReport& r) {
    write_text_file(dir + "/" + stem + ".json", report_to_json(r).dump(2) + "\n");
    write_text_file(dir + "/" + stem + "_histogram.csv", histogram_csv(r));
    write_text_file(dir + "/" + stem + "_per_bit.csv", per_bit_csv(r));
    if (!r.loss_history.empty())
        write_text_file(dir + "/" + stem + "_loss.csv", loss_csv(r.loss_history));
    auto to_d = [](const std::vector<long>& v) {
        return std::vector<double>(v.begin(), v.end());
    };
    write_text_file(dir + "/" + stem + "_loss.svg",
                    svg::line_chart(r.loss_history, "training loss per epoch"));
    write_text_file(dir + "/" + stem + "_histogram_predicted.svg",
                    svg::bar_chart(to_d(r.predicted.histogram), "miss histogram (predicted)"));
    write_text_file(dir + "/" + stem + "_histogram_baseline.svg",
                    svg::bar_chart(to_d(r.random_baseline.histogram),
                                   "miss histogram (random baseline)"));
    write_text_file(dir + "/" + stem + "_per_bit.svg",
                    svg::bar_chart(r.predicted.per_bit_freq, "per-bit miss frequency (predicted)"));
}

// --- checkpoints ---

inline constexpr char kCheckpointMagic[] = "FZHCKPT1";

/// Binary container: magic, config-echo JSON (length-prefixed), model
/// parameters with running stats, optimizer moments and step counter.
inline void save_checkpoint(const std::string& path, const ExperimentConfig& cfg, const Mlp& model,
                            const NadamOptimizer& opt) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
    f.write(kCheckpointMagic, 8);
    std::string echo = to_json(cfg).dump();
    uint64_t len = echo.size();
    f.write(reinterpret_cast<const char*>(&len), sizeof(len));
    f.write(echo.data(), static_cast<std::streamsize>(echo.size()));
    model.save_params(f);
    opt.save_state(f);
    if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

/// Reads the config echo embedded in a checkpoint without loading tensors.
inline ExperimentConfig checkpoint_config(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != kCheckpointMagic)
        throw std::runtime_error("not a checkpoint file");
    uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string echo(len, '\0');
    is.read(echo.data(), static_cast<std::streamsize>(len));
    if (!is) throw std::runtime_error("truncated checkpoint header");
    return config_from_json(nlohmann::json::parse(echo));
}

struct LoadedCheckpoint {
    ExperimentConfig config;
    std::unique_ptr<Mlp> model;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    LoadedCheckpoint out;
    out.config = checkpoint_config(f);
    out.model = std::make_unique<Mlp>(out.config.mlp_config());
    out.model->load_params(f);
    return out;
}

}  // namespace fuzhash

#endif
