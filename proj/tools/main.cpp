// Command-line front end: config-driven synthetic experiments, the
// verification suite, and loss evaluation on problem files. All artifacts
// are CSV/JSON and byte-stable for a fixed config and seed.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "../oracle/verify.hpp"
#include "ranksort/baselines.hpp"
#include "ranksort/io.hpp"
#include "ranksort/localisation.hpp"
#include "ranksort/metrics.hpp"
#include "ranksort/rs_loss.hpp"
#include "ranksort/synth.hpp"

namespace {

using json = nlohmann::json;
using namespace ranksort;

void print_error(const std::string& type, const std::string& message) {
    json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    std::cerr << err.dump() << "\n";
}

std::size_t thread_cap() {
    std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RANKSORT_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) cap = static_cast<std::size_t>(parsed);
    }
    return cap;
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::string loss_name;
    double delta = 0.0;  // 0 means "not given"
    std::uint64_t seed = 0;
    bool seed_given = false;
};

synth::SynthConfig synth_config_from(const io::Config& config,
                                     const CommonFlags& flags) {
    synth::SynthConfig cfg;
    cfg.n_features = config.get_u64("synth.n_features", cfg.n_features);
    cfg.n_positives = config.get_u64("synth.n_positives", cfg.n_positives);
    cfg.n_negatives = config.get_u64("synth.n_negatives", cfg.n_negatives);
    cfg.batches_per_epoch =
        config.get_u64("synth.batches_per_epoch", cfg.batches_per_epoch);
    cfg.epochs = config.get_u64("synth.epochs", cfg.epochs);
    cfg.label_noise = config.get_double("synth.label_noise", cfg.label_noise);
    cfg.class_separation =
        config.get_double("synth.class_separation", cfg.class_separation);
    cfg.quality_signal =
        config.get_double("synth.quality_signal", cfg.quality_signal);
    cfg.learning_rate =
        config.get_double("synth.learning_rate", cfg.learning_rate);
    cfg.seed = config.get_u64("synth.seed", cfg.seed);
    if (flags.seed_given) cfg.seed = flags.seed;
    return cfg;
}

synth::LossChoice loss_choice_from(const io::Config& config,
                                   const CommonFlags& flags) {
    const std::string name = !flags.loss_name.empty()
                                 ? flags.loss_name
                                 : config.get_string("loss.kind", "rs");
    synth::LossChoice choice = synth::LossChoice::make(synth::loss_kind_from_name(name));
    choice.delta = config.get_double("loss.delta", choice.delta);
    choice.focal_alpha = config.get_double("loss.focal_alpha", choice.focal_alpha);
    choice.focal_gamma = config.get_double("loss.focal_gamma", choice.focal_gamma);
    if (flags.delta > 0.0) choice.delta = flags.delta;
    return choice;
}

WeightingMode weighting_from(const io::Config& config) {
    const std::string mode = config.get_string("weighting.mode", "score");
    if (mode == "none") return WeightingMode::none();
    if (mode == "score") return WeightingMode::score_based();
    if (mode == "iou") return WeightingMode::iou_based();
    if (mode == "ranking") {
        return WeightingMode::ranking_based(
            config.get_double("weighting.delta_loc", 1.0));
    }
    throw std::invalid_argument("unknown weighting mode: " + mode);
}

BalanceMode balance_from(const io::Config& config) {
    const std::string mode = config.get_string("balance.mode", "value");
    if (mode == "value") return BalanceMode::value_based();
    if (mode == "magnitude") return BalanceMode::magnitude_based();
    if (mode == "constant") {
        return BalanceMode::constant(config.get_double("balance.lambda", 1.0));
    }
    throw std::invalid_argument("unknown balance mode: " + mode);
}

void write_train_report(const synth::TrainReport& report,
                        const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::vector<std::string>> epoch_rows;
    for (const synth::EpochRecord& e : report.epochs) {
        epoch_rows.push_back({std::to_string(e.epoch),
                              io::format_double(e.mean_cls_loss),
                              io::format_double(e.mean_box_loss),
                              io::format_double(e.lambda_box),
                              io::format_double(e.ap),
                              io::format_double(e.spearman),
                              io::format_double(e.cls_grad_l1),
                              io::format_double(e.box_grad_l1)});
    }
    io::write_csv(out_dir + "/epochs.csv",
                  "epoch,mean_cls_loss,mean_box_loss,lambda_box,ap,spearman_rho,"
                  "cls_grad_l1,box_grad_l1",
                  epoch_rows);

    std::vector<std::vector<std::string>> iter_rows;
    for (const synth::IterationRecord& it : report.iterations) {
        iter_rows.push_back({std::to_string(it.epoch), std::to_string(it.iteration),
                             io::format_double(it.cls_loss),
                             io::format_double(it.box_loss),
                             io::format_double(it.lambda_box),
                             it.balance_degenerate ? "1" : "0"});
    }
    io::write_csv(out_dir + "/iterations.csv",
                  "epoch,iteration,cls_loss,box_loss,lambda_box,balance_degenerate",
                  iter_rows);
}

int cmd_gradcheck(std::uint64_t seed, bool seed_given) {
    oracle::VerifyOptions options;
    if (seed_given) options.seed = seed;
    const std::vector<oracle::CheckResult> results = oracle::run_verification(options);
    bool all_pass = true;
    double worst = 0.0;
    for (const oracle::CheckResult& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name
                  << "  max deviation " << io::format_double(r.max_deviation)
                  << " (tolerance " << io::format_double(r.tolerance) << ", "
                  << r.cases << " cases)\n";
        all_pass = all_pass && r.pass;
        worst = std::max(worst, r.max_deviation - r.tolerance);
    }
    std::cout << (all_pass ? "gradcheck: all checks passed\n"
                           : "gradcheck: FAILURES detected\n");
    if (!all_pass) {
        print_error("gradcheck_failed",
                    "worst deviation exceeds tolerance by " + io::format_double(worst));
        return 1;
    }
    return 0;
}

int cmd_eval_loss(const std::string& problem_path, const CommonFlags& flags) {
    const io::ProblemFile file = io::read_problem_file(problem_path);
    const std::string name = flags.loss_name.empty() ? "rs" : flags.loss_name;

    json out;
    if (name == "rs") {
        const SmoothStep step(flags.delta > 0.0 ? flags.delta : kDefaultRsDelta);
        const RsModel model;
        LossReport report = compute_loss(file.problem, model, step);
        report.gradients = rs_gradients(file.problem, step);
        report.loss = rs_loss_value(file.problem, step);
        out["loss"] = report.loss;
        for (const PositiveErrors& e : report.per_positive) {
            out["per_positive"].push_back({{"index", e.index},
                                           {"current_ranking", e.current_ranking},
                                           {"current_sorting", e.current_sorting},
                                           {"target_sorting", e.target_sorting}});
        }
        out["gradients"] = report.gradients;
    } else if (name == "ap") {
        const LossReport report =
            ap_loss(file.problem,
                    SmoothStep(flags.delta > 0.0 ? flags.delta : kDefaultApDelta));
        out["loss"] = report.loss;
        for (const PositiveErrors& e : report.per_positive) {
            out["per_positive"].push_back({{"index", e.index},
                                           {"current_ranking", e.current_ranking},
                                           {"current_sorting", e.current_sorting},
                                           {"target_sorting", e.target_sorting}});
        }
        out["gradients"] = report.gradients;
    } else {
        throw std::invalid_argument(
            "eval-loss supports ranking losses only (rs or ap), got: " + name);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_train(const CommonFlags& flags) {
    const io::Config config = io::Config::parse_file(flags.config_path);
    const synth::SynthConfig cfg = synth_config_from(config, flags);
    const synth::LossChoice loss = loss_choice_from(config, flags);
    const synth::TrainReport report =
        synth::train(cfg, loss, weighting_from(config), balance_from(config));
    write_train_report(report, flags.out_dir);
    if (report.diverged) {
        print_error("diverged", report.divergence_note);
        return 1;
    }
    if (!report.epochs.empty()) {
        const synth::EpochRecord& last = report.epochs.back();
        std::cout << "train: " << report.epochs.size() << " epochs, final ap "
                  << io::format_double(last.ap) << ", final spearman "
                  << io::format_double(last.spearman) << "\n";
    } else {
        std::cout << "train: 0 epochs\n";
    }
    return 0;
}

int cmd_sweep_imbalance(const CommonFlags& flags) {
    const io::Config config = io::Config::parse_file(flags.config_path);
    const synth::SynthConfig base = synth_config_from(config, flags);

    std::vector<std::size_t> ratios;
    for (const double r : config.get_double_list("sweep.ratios", {10, 100, 1000})) {
        if (r < 1.0) throw std::invalid_argument("sweep ratios must be >= 1");
        ratios.push_back(static_cast<std::size_t>(r));
    }
    std::vector<synth::LossChoice> losses;
    for (const std::string& name :
         config.get_string_list("sweep.losses", {"rs", "ce"})) {
        synth::LossChoice choice =
            synth::LossChoice::make(synth::loss_kind_from_name(name));
        choice.delta = config.get_double("loss.delta", choice.delta);
        if (flags.delta > 0.0) choice.delta = flags.delta;
        losses.push_back(choice);
    }
    std::vector<std::uint64_t> seeds;
    for (const double s : config.get_double_list("sweep.seeds", {1, 2, 3})) {
        seeds.push_back(static_cast<std::uint64_t>(s));
    }

    const std::vector<synth::SweepRow> rows = synth::imbalance_sweep(
        base, ratios, losses, seeds, weighting_from(config), balance_from(config),
        thread_cap());

    std::filesystem::create_directories(flags.out_dir);
    std::vector<std::vector<std::string>> csv_rows;
    for (const synth::SweepRow& row : rows) {
        csv_rows.push_back({std::to_string(row.ratio),
                            synth::loss_kind_name(row.loss),
                            std::to_string(row.seed),
                            io::format_double(row.final_ap),
                            io::format_double(row.final_spearman),
                            row.diverged ? "1" : "0"});
    }
    io::write_csv(flags.out_dir + "/imbalance.csv",
                  "ratio,loss,seed,final_ap,final_spearman,diverged", csv_rows);
    std::cout << "sweep-imbalance: " << rows.size() << " cells\n";
    return 0;
}

int cmd_ablate_sorting(const CommonFlags& flags) {
    const io::Config config = io::Config::parse_file(flags.config_path);
    const synth::SynthConfig base = synth_config_from(config, flags);
    const WeightingMode weighting = weighting_from(config);
    const BalanceMode balance = balance_from(config);

    std::vector<std::uint64_t> seeds;
    for (const double s :
         config.get_double_list("sweep.seeds", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10})) {
        seeds.push_back(static_cast<std::uint64_t>(s));
    }

    synth::LossChoice full = synth::LossChoice::make(synth::LossKind::rs);
    synth::LossChoice rank_only =
        synth::LossChoice::make(synth::LossKind::rs_ranking_only);
    full.delta = config.get_double("loss.delta", full.delta);
    rank_only.delta = full.delta;
    if (flags.delta > 0.0) {
        full.delta = flags.delta;
        rank_only.delta = flags.delta;
    }

    std::vector<std::vector<std::string>> rows;
    double mean_gap = 0.0;
    for (const std::uint64_t seed : seeds) {
        synth::SynthConfig cfg = base;
        cfg.seed = seed;
        const synth::TrainReport with = synth::train(cfg, full, weighting, balance);
        const synth::TrainReport without =
            synth::train(cfg, rank_only, weighting, balance);
        const double rho_with =
            with.epochs.empty() ? 0.0 : with.epochs.back().spearman;
        const double rho_without =
            without.epochs.empty() ? 0.0 : without.epochs.back().spearman;
        const double ap_with = with.epochs.empty() ? 0.0 : with.epochs.back().ap;
        const double ap_without =
            without.epochs.empty() ? 0.0 : without.epochs.back().ap;
        mean_gap += (rho_with - rho_without) / static_cast<double>(seeds.size());
        rows.push_back({std::to_string(seed), io::format_double(ap_with),
                        io::format_double(rho_with), io::format_double(ap_without),
                        io::format_double(rho_without)});
    }
    std::filesystem::create_directories(flags.out_dir);
    io::write_csv(flags.out_dir + "/ablation.csv",
                  "seed,ap_full,spearman_full,ap_ranking_only,spearman_ranking_only",
                  rows);
    std::cout << "ablate-sorting: mean spearman gap "
              << io::format_double(mean_gap) << " over " << seeds.size()
              << " seeds\n";
    return 0;
}

int cmd_sweep_delta(const CommonFlags& flags) {
    const io::Config config = io::Config::parse_file(flags.config_path);
    const synth::SynthConfig base = synth_config_from(config, flags);
    const WeightingMode weighting = weighting_from(config);
    const BalanceMode balance = balance_from(config);

    const std::vector<double> deltas = config.get_double_list(
        "sweep.deltas", {0.25, 0.4, 0.5, 0.6, 0.75, 1.0});

    std::vector<std::vector<std::string>> rows;
    for (const double delta : deltas) {
        if (!(delta > 0.0)) throw std::invalid_argument("deltas must be > 0");
        synth::LossChoice choice = synth::LossChoice::make(synth::LossKind::rs);
        choice.delta = delta;
        const synth::TrainReport report =
            synth::train(base, choice, weighting, balance);
        const double ap = report.epochs.empty() ? 0.0 : report.epochs.back().ap;
        const double rho =
            report.epochs.empty() ? 0.0 : report.epochs.back().spearman;
        rows.push_back({io::format_double(delta), io::format_double(ap),
                        io::format_double(rho)});
    }
    std::filesystem::create_directories(flags.out_dir);
    io::write_csv(flags.out_dir + "/delta_sweep.csv",
                  "delta,final_ap,final_spearman", rows);
    std::cout << "sweep-delta: " << deltas.size() << " settings\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ranking and sorting losses: experiments and verification"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string problem_path;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* config_opt =
            cmd->add_option("--config", flags.config_path, "configuration file");
        if (needs_config) config_opt->required();
        cmd->add_option("--out", flags.out_dir, "output directory");
        cmd->add_option("--loss", flags.loss_name, "loss: rs|ap|ce|focal|rs-rank-only");
        cmd->add_option("--delta", flags.delta, "smoothing half-width override");
        cmd->add_option("--seed", flags.seed, "seed override")
            ->each([&](const std::string&) { flags.seed_given = true; });
    };

    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "run the oracle-equivalence and invariant suite");
    gradcheck->add_option("--seed", flags.seed, "corpus seed")
        ->each([&](const std::string&) { flags.seed_given = true; });

    CLI::App* train = app.add_subcommand("train", "one synthetic training run");
    add_common(train, true);

    CLI::App* sweep = app.add_subcommand(
        "sweep-imbalance", "final AP per (ratio, loss, seed) cell");
    add_common(sweep, true);

    CLI::App* ablate = app.add_subcommand(
        "ablate-sorting", "sorting term on/off comparison across seeds");
    add_common(ablate, true);

    CLI::App* sweep_delta = app.add_subcommand(
        "sweep-delta", "smoothing half-width grid for the rank-and-sort loss");
    add_common(sweep_delta, true);

    CLI::App* eval = app.add_subcommand("eval-loss", "evaluate a problem file");
    eval->add_option("--problem", problem_path, "problem file")->required();
    eval->add_option("--loss", flags.loss_name, "loss: rs|ap");
    eval->add_option("--delta", flags.delta, "smoothing half-width override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gradcheck->parsed()) return cmd_gradcheck(flags.seed, flags.seed_given);
        if (train->parsed()) return cmd_train(flags);
        if (sweep->parsed()) return cmd_sweep_imbalance(flags);
        if (ablate->parsed()) return cmd_ablate_sorting(flags);
        if (sweep_delta->parsed()) return cmd_sweep_delta(flags);
        if (eval->parsed()) return cmd_eval_loss(problem_path, flags);
    } catch (const io::ParseError& e) {
        print_error("config_parse_error", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        print_error("invalid_argument", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("runtime_error", e.what());
        return 1;
    }
    return 0;
}
