// coevo: command-line driver for the streaming OOD engine.
//
//   coevo synth   --out DIR [generator flags]
//   coevo run     --id-text T --corpus C --test X --out results.tsv [engine flags]
//   coevo eval    --results R --truth X [--id-text T] [--sweep lambda|gamma ...]
//   coevo inspect PATH            (cache snapshot or results file)
//
// Exit codes: 0 ok, 1 usage/config, 2 data or format, 3 internal.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coevo/config.hpp"
#include "coevo/engine.hpp"
#include "coevo/metrics.hpp"
#include "coevo/pipeline.hpp"
#include "coevo/results_io.hpp"
#include "coevo/snapshot.hpp"
#include "coevo/synth.hpp"
#include "coevo/table_io.hpp"

namespace fs = std::filesystem;
using namespace coevo;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double x, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// ---------------------------------------------------------------------------
// engine flags shared by run and eval

struct EngineFlags {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App& app) {
        const EngineConfig d;
        const auto add = [&](const std::string& flag, const std::string& key, const std::string& def,
                             const std::string& help) {
            options[key] = app.add_option(flag, values[key], help)->default_str(def);
        };
        add("--tau", "tau", "0.01", "temperature of the exponential-ratio scores");
        add("--lambda", "lambda", "0.8", "text weight in the pre fusion, visual weight post; [0.5, 1)");
        add("--beta", "beta", "5.5", "attention sharpness of visual aggregation");
        add("--queue-len", "queue_len", std::to_string(d.queue_len), "visual slots per proxy (L)");
        add("--top-n", "top_n", std::to_string(d.top_n), "negatives mined per confident sample (N)");
        add("--gamma", "gamma", "0.2", "confidence margin around the adaptive threshold");
        add("--window", "window", std::to_string(d.window), "threshold sliding-window size");
        add("--bins", "bins", std::to_string(d.bins), "threshold histogram bins");
        add("--ablation", "ablation", "full", "full|textual-only|visual-only|static");
        add("--margin-form", "margin_form", "alg1", "lower gate form: alg1|maintext");
        add("--seed", "seed", "0", "run seed (echoed; the engine itself draws no randomness)");
        add("--init-negatives", "init_negatives", std::to_string(d.init_negatives),
            "initial negative text proxies (M)");
        add("--init-mode", "init_mode", "farthest", "farthest|given-list");
        add("--max-negatives", "max_negatives", "none", "cap on the negative text queue");
        app.add_option("--config", config_path, "key = value config file; flags override it");
    }

    EngineConfig resolve() const {
        EngineConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) apply_setting(cfg, key, values.at(key));
        }
        cfg.validate();
        return cfg;
    }
};

Table load(const std::string& path) {
    auto loaded = read_table(path);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
    return std::move(loaded.table);
}

// ---------------------------------------------------------------------------
// synth

struct SynthCmd {
    SynthSpec spec;
    std::string out_dir;

    void attach(CLI::App& app) {
        app.add_option("--out,--out-dir", out_dir, "directory for id_text.cevt, corpus.cevt, test.cevt")->required();
        app.add_option("--dim", spec.dim, "embedding dimension")->capture_default_str();
        app.add_option("--classes", spec.id_classes, "ID classes (K)")->capture_default_str();
        app.add_option("--ood-clusters", spec.ood_clusters, "OOD clusters")->capture_default_str();
        app.add_option("--samples-per-class", spec.samples_per_class, "ID samples per class")->capture_default_str();
        app.add_option("--kappa", spec.kappa, "sample concentration")->capture_default_str();
        app.add_option("--drift", spec.drift_deg_per_100, "drift in degrees per 100 samples")->capture_default_str();
        app.add_option("--ratio", spec.id_ood_ratio, "ID:OOD count ratio")->capture_default_str();
        app.add_option("--corpus-size", spec.corpus_size, "corpus entries")->capture_default_str();
        app.add_option("--seed", spec.seed, "generator seed")->capture_default_str();
        app.add_option("--max-center-cos", spec.max_center_cos, "max pairwise center cosine")->capture_default_str();
        app.add_option("--text-kappa", spec.text_kappa, "class-text concentration (0 = on center)")->capture_default_str();
        app.add_option("--corpus-copies", spec.corpus_copies, "corpus copies per center")->capture_default_str();
        app.add_option("--corpus-kappa", spec.corpus_kappa, "corpus copy concentration")->capture_default_str();
    }

    int run() const {
        const auto tables = generate(spec);
        fs::create_directories(out_dir);
        const std::pair<const char*, const Table*> files[] = {
            {"id_text.cevt", &tables.id_text}, {"corpus.cevt", &tables.corpus}, {"test.cevt", &tables.test}};
        for (const auto& [name, table] : files) {
            const auto path = fs::path(out_dir) / name;
            write_table(path, *table);
            std::cout << path.string() << " records=" << table->records.size() << '\n';
        }
        return kOk;
    }
};

// ---------------------------------------------------------------------------
// run

struct RunCmd {
    EngineFlags engine;
    std::string id_text, corpus, test, out, snapshot;

    void attach(CLI::App& app) {
        app.add_option("--id-text", id_text, "ID class text table")->required();
        app.add_option("--corpus", corpus, "negative-mining corpus table")->required();
        app.add_option("--test", test, "test sample table")->required();
        app.add_option("--out", out, "results file")->required();
        app.add_option("--snapshot", snapshot, "write the final cache snapshot here");
        engine.attach(app);
    }

    int run() const {
        const EngineConfig cfg = engine.resolve();
        const auto inputs = prepare_inputs(load(id_text), load(corpus), load(test));

        auto t_p = init_positive(inputs.id_text);
        Corpus pool(inputs.corpus, t_p);
        Engine eng(cfg, std::move(t_p), std::move(pool));
        const auto result = run_stream(eng, inputs.samples);
        for (const auto& e : result.skipped) std::cerr << "skipped: " << e.message << '\n';

        write_results(out, result.records);
        if (!snapshot.empty()) write_snapshot(snapshot, eng);

        std::istringstream echo(format_config(cfg));
        for (std::string line; std::getline(echo, line);) std::cout << "# " << line << '\n';
        std::cout << "records=" << result.records.size() << " skipped=" << result.skipped.size()
                  << " negatives=" << eng.negative().size() << " out=" << out << '\n';
        return result.skipped.empty() ? kOk : kData;
    }
};

// ---------------------------------------------------------------------------
// eval

struct Aligned {
    std::vector<ScoreRecord> records;
    std::vector<GroundTruth> truth;
};

Aligned align(std::vector<ScoreRecord> records, const Table& truth_table) {
    const auto truth = ground_truth(truth_table);
    if (records.size() != truth.size()) {
        throw IoError("results hold " + std::to_string(records.size()) + " records but truth table holds " +
                      std::to_string(truth.size()));
    }
    Aligned a;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].sample_id != i) {
            throw IoError("sample_id mismatch at results row " + std::to_string(i) + ": got " +
                          std::to_string(records[i].sample_id));
        }
        if (!truth[i]) throw IoError("truth record " + std::to_string(i) + " is unlabeled");
        a.truth.push_back(*truth[i]);
    }
    a.records = std::move(records);
    return a;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') throw UsageError("bad grid value '" + item + "'");
        out.push_back(x);
    }
    if (out.empty()) throw UsageError("empty grid");
    return out;
}

std::vector<std::optional<std::size_t>> text_argmax(const Table& id_text, const Table& truth_table) {
    const auto classes = labeled_embeddings(id_text);
    std::vector<std::optional<std::size_t>> out;
    for (const auto& r : truth_table.records) {
        const auto e = r.embedding();
        std::vector<double> cos;
        for (const auto& c : classes) cos.push_back(cosine(e, c.embedding));
        out.push_back(argmax(cos));
    }
    return out;
}

struct EvalCmd {
    EngineFlags engine;
    std::string results, truth, id_text, corpus, sweep;
    std::string grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";

    void attach(CLI::App& app) {
        app.add_option("--results", results, "results file from `run`")->required();
        app.add_option("--truth", truth, "labeled test table the results were produced from")->required();
        app.add_option("--id-text", id_text, "ID class text table (enables text-argmax ID-ACC)");
        app.add_option("--corpus", corpus, "corpus table (needed by --sweep gamma)");
        app.add_option("--sweep", sweep, "lambda: re-fuse recorded scores; gamma: re-run the engine")
            ->check(CLI::IsMember({"lambda", "gamma"}));
        app.add_option("--grid", grid, "comma-separated sweep values")->capture_default_str();
        engine.attach(app);
    }

    int run() const {
        const Table truth_table = load(truth);
        const auto a = align(read_results(results), truth_table);

        std::vector<double> pre, post;
        std::vector<std::optional<std::size_t>> visual_pred;
        for (const auto& r : a.records) {
            pre.push_back(r.s_pre);
            post.push_back(r.s_post);
            visual_pred.push_back(r.predicted_class);
        }
        const auto s_pre = summarize(pre, a.truth);
        const auto s_post = summarize(post, a.truth);
        const double acc_visual = id_acc(visual_pred, a.truth);
        std::optional<double> acc_text;
        if (!id_text.empty()) acc_text = id_acc(text_argmax(load(id_text), truth_table), a.truth);

        std::cout << "metric          pre        post\n"
                  << "AUROC           " << fmt(s_pre.auroc) << "   " << fmt(s_post.auroc) << '\n'
                  << "FPR95           " << fmt(s_pre.fpr95) << "   " << fmt(s_post.fpr95) << '\n'
                  << "ID-ACC(visual)  " << fmt(acc_visual) << '\n';
        if (acc_text) std::cout << "ID-ACC(text)    " << fmt(*acc_text) << '\n';
        std::cout << "summary n_id=" << s_post.n_id << " n_ood=" << s_post.n_ood << " auroc_pre=" << fmt(s_pre.auroc)
                  << " auroc_post=" << fmt(s_post.auroc) << " fpr95_pre=" << fmt(s_pre.fpr95)
                  << " fpr95_post=" << fmt(s_post.fpr95) << " id_acc_visual=" << fmt(acc_visual);
        if (acc_text) std::cout << " id_acc_text=" << fmt(*acc_text);
        std::cout << '\n';

        if (sweep == "lambda") lambda_sweep(a);
        if (sweep == "gamma") gamma_sweep(truth_table, a.truth);
        return kOk;
    }

    // Replays both fusions from the recorded unimodal scores. The gating that
    // produced those scores is not re-run.
    void lambda_sweep(const Aligned& a) const {
        for (double lam : parse_grid(grid)) {
            std::vector<double> pre, flip, noflip;
            for (const auto& r : a.records) {
                pre.push_back(lam * r.s_t_pre + (1 - lam) * r.s_v_pre);
                flip.push_back((1 - lam) * r.s_t_post + lam * r.s_v_post);
                noflip.push_back(lam * r.s_t_post + (1 - lam) * r.s_v_post);
            }
            const auto sp = summarize(pre, a.truth), sf = summarize(flip, a.truth), sn = summarize(noflip, a.truth);
            std::cout << "sweep lambda=" << fmt(lam, 3) << " auroc_pre=" << fmt(sp.auroc) << " fpr95_pre=" << fmt(sp.fpr95)
                      << " auroc_post=" << fmt(sf.auroc) << " fpr95_post=" << fmt(sf.fpr95)
                      << " auroc_post_noflip=" << fmt(sn.auroc) << " fpr95_post_noflip=" << fmt(sn.fpr95) << '\n';
        }
    }

    void gamma_sweep(const Table& truth_table, const std::vector<GroundTruth>& labels) const {
        if (id_text.empty() || corpus.empty()) throw UsageError("--sweep gamma needs --id-text and --corpus");
        const auto inputs = prepare_inputs(load(id_text), load(corpus), truth_table);
        EngineConfig base = engine.resolve();
        for (double g : parse_grid(grid)) {
            EngineConfig cfg = base;
            cfg.gamma = g;
            cfg.validate();
            const auto res = run_inputs(cfg, inputs);
            std::vector<double> post;
            for (const auto& r : res.records) post.push_back(r.s_post);
            const auto s = summarize(post, labels);
            std::cout << "sweep gamma=" << fmt(g, 3) << " auroc_post=" << fmt(s.auroc) << " fpr95_post=" << fmt(s.fpr95)
                      << '\n';
        }
    }
};

// ---------------------------------------------------------------------------
// inspect

bool is_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    char magic[4] = {};
    in.read(magic, 4);
    return in.gcount() == 4 && std::equal(magic, magic + 4, kTableMagic);
}

void describe_queues(const char* name, const std::vector<std::vector<SlotInfo>>& queues) {
    std::map<std::size_t, std::size_t> by_size;
    std::size_t seeds = 0;
    std::vector<double> finite;
    for (const auto& q : queues) {
        ++by_size[q.size()];
        for (const auto& s : q) {
            if (s.entropy == kSeedEntropy) {
                ++seeds;
            } else {
                finite.push_back(s.entropy);
            }
        }
    }
    std::cout << name << "_queues=" << queues.size() << " seed_slots=" << seeds << " sample_slots=" << finite.size()
              << '\n';
    for (const auto& [size, n] : by_size) std::cout << "  " << n << " queue(s) with " << size << " populated slot(s)\n";
    if (!finite.empty()) {
        std::sort(finite.begin(), finite.end());
        std::cout << "  entropy min=" << fmt(finite.front()) << " median=" << fmt(finite[finite.size() / 2])
                  << " max=" << fmt(finite.back()) << '\n';
    }
}

int inspect_snapshot(const std::string& path) {
    const auto snap = parse_snapshot(load(path), path);
    std::cout << "snapshot " << path << '\n';
    std::cout << "positive_text=" << snap.positive_labels.size() << " negative_text=" << snap.negative_labels.size()
              << " negative_visual=" << snap.negative_slots.size()
              << (snap.negative_labels.size() == snap.negative_slots.size() ? " (synchronized)" : " (MISMATCH)")
              << '\n';
    describe_queues("positive", snap.positive_slots);
    describe_queues("negative", snap.negative_slots);

    std::size_t initial = 0;
    std::map<std::uint64_t, std::size_t> added;
    for (const auto& o : snap.negative_origin) {
        if (o) {
            ++added[*o];
        } else {
            ++initial;
        }
    }
    std::cout << "negative_growth initial=" << initial << " steps_with_growth=" << added.size() << '\n';
    std::size_t total = initial;
    std::size_t shown = 0;
    const std::size_t stride = std::max<std::size_t>(1, added.size() / 10);
    for (const auto& [sample, n] : added) {
        total += n;
        if (shown++ % stride == 0) std::cout << "  after sample " << sample << ": |T_n|=" << total << '\n';
    }
    if (!added.empty()) std::cout << "  final |T_n|=" << total << '\n';
    return kOk;
}

int inspect_results(const std::string& path, bool full) {
    const auto records = read_results(path);
    std::size_t n_id = 0, n_ood = 0, n_amb = 0;
    for (const auto& r : records) {
        if (r.decision == Decision::PredID) ++n_id;
        else if (r.decision == Decision::PredOOD) ++n_ood;
        else ++n_amb;
    }
    std::cout << "results " << path << '\n'
              << "records=" << records.size() << " pred_id=" << n_id << " pred_ood=" << n_ood << " ambiguous=" << n_amb
              << '\n'
              << "delta_trajectory_length=" << records.size() << '\n';
    const std::size_t stride = full ? 1 : std::max<std::size_t>(1, records.size() / 10);
    for (std::size_t i = 0; i < records.size(); i += stride) {
        std::cout << "  sample " << records[i].sample_id << ": delta=" << fmt(records[i].delta) << '\n';
    }
    return kOk;
}

struct InspectCmd {
    std::string path;
    bool full = false;

    void attach(CLI::App& app) {
        app.add_option("path", path, "cache snapshot (.cevt) or results file")->required();
        app.add_flag("--full", full, "print every delta instead of a sampled trajectory");
    }

    int run() const { return is_table(path) ? inspect_snapshot(path) : inspect_results(path, full); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coevo: streaming out-of-distribution detection over embedding tables"};
    app.require_subcommand(1);
    SynthCmd synth;
    RunCmd run;
    EvalCmd eval;
    InspectCmd inspect;
    auto* c_synth = app.add_subcommand("synth", "generate synthetic embedding tables");
    auto* c_run = app.add_subcommand("run", "stream a test table through the engine");
    auto* c_eval = app.add_subcommand("eval", "score a results file against ground truth");
    auto* c_inspect = app.add_subcommand("inspect", "dump a cache snapshot or results file");
    synth.attach(*c_synth);
    run.attach(*c_run);
    eval.attach(*c_eval);
    inspect.attach(*c_inspect);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (c_synth->parsed()) return synth.run();
        if (c_run->parsed()) return run.run();
        if (c_eval->parsed()) return eval.run();
        if (c_inspect->parsed()) return inspect.run();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kData;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const InitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const SynthError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const MetricError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
