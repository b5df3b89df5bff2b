// Command-line front end: dataset generation, training, evaluation,
// Hamiltonian-cycle search and model inspection.
//
// Exit codes: 0 ok, 1 I/O or input error, 2 inconsistent axioms,
// 3 attempt budget exhausted.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aml/crossing.hpp"
#include "aml/embed.hpp"
#include "aml/evalstat.hpp"
#include "aml/serialize.hpp"
#include "aml/sparse.hpp"

namespace fs = std::filesystem;
using namespace aml;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInconsistent = 2;
constexpr int kExitBudget = 3;

struct CommonTrainArgs {
    std::string config_path;
    double gamma = -1, kappa = -1, delta = -1;
    std::int64_t max_batches = -1, batch_start = -1, batch_ramp = -1;
    std::int64_t seed = -1;
    int full_batch = -1;
    int stop_on_zero = -1;
};

TrainConfig parse_key_value_config(const std::string& path) {
    TrainConfig cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        if (key == "gamma") cfg.simplification_threshold = std::stod(value);
        else if (key == "kappa") cfg.dual_min_duple_fraction = std::stod(value);
        else if (key == "delta") cfg.subset_fraction = std::stod(value);
        else if (key == "batch_start") cfg.batch_start = std::stoul(value);
        else if (key == "batch_ramp") cfg.batch_ramp = std::stoul(value);
        else if (key == "batch_final_fraction") cfg.batch_final_fraction = std::stod(value);
        else if (key == "full_batch") cfg.full_batch = value == "true" || value == "1";
        else if (key == "max_batches") cfg.max_batches = std::stoul(value);
        else if (key == "stop_on_zero_training_error")
            cfg.stop_on_zero_training_error = value == "true" || value == "1";
        else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
        else throw std::runtime_error("unknown config key: " + key);
    }
    return cfg;
}

TrainConfig resolve_config(const CommonTrainArgs& a) {
    TrainConfig cfg;
    if (!a.config_path.empty()) cfg = parse_key_value_config(a.config_path);
    if (a.gamma > 0) cfg.simplification_threshold = a.gamma;
    if (a.kappa >= 0) cfg.dual_min_duple_fraction = a.kappa;
    if (a.delta > 0) cfg.subset_fraction = a.delta;
    if (a.max_batches >= 0) cfg.max_batches = static_cast<std::size_t>(a.max_batches);
    if (a.batch_start >= 0) cfg.batch_start = static_cast<std::size_t>(a.batch_start);
    if (a.batch_ramp >= 0) cfg.batch_ramp = static_cast<std::size_t>(a.batch_ramp);
    if (a.seed >= 0) cfg.rng_seed = static_cast<std::uint64_t>(a.seed);
    if (a.full_batch >= 0) cfg.full_batch = a.full_batch != 0;
    if (a.stop_on_zero >= 0) cfg.stop_on_zero_training_error = a.stop_on_zero != 0;
    cfg.validate();
    return cfg;
}

double union_load(const AtomizedModel& m, std::uint64_t step) {
    std::vector<AtomStats> stats;
    stats.reserve(m.size());
    for (const auto& a : m.atoms()) stats.push_back(stats_of(a, step));
    return load_and_transition(stats, step).load;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Hand-written axiom files:
///   constants: a b c p
///   + a b : p        # a⊙b ≤ p
///   - a : b          # a ≰ b
struct ParsedAxioms {
    UniversePtr universe;
    AxiomSet axioms{1};
};

ParsedAxioms parse_axiom_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<std::string> names;
    std::vector<std::tuple<char, std::vector<std::string>, std::vector<std::string>>> raw;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        if (head == "constants:") {
            std::string n;
            while (ls >> n) names.push_back(n);
        } else if (head == "+" || head == "-") {
            std::vector<std::string> left, right;
            std::string tok;
            bool after_colon = false;
            while (ls >> tok) {
                if (tok == ":") after_colon = true;
                else (after_colon ? right : left).push_back(tok);
            }
            if (left.empty() || right.empty())
                throw std::runtime_error(path + ": duple needs 'left... : right...'");
            raw.emplace_back(head[0], std::move(left), std::move(right));
        } else {
            throw std::runtime_error(path + ": unrecognized line: " + line);
        }
    }
    if (names.empty()) throw std::runtime_error(path + ": missing constants: line");
    ParsedAxioms out;
    out.universe = make_universe(names);
    out.axioms = AxiomSet(names.size());
    auto term_of = [&](const std::vector<std::string>& labels) {
        std::vector<std::uint32_t> ids;
        for (const auto& l : labels) ids.push_back(out.universe->id(l));
        return Term(names.size(), ids);
    };
    for (auto& [sign, left, right] : raw)
        out.axioms.add(term_of(left), term_of(right),
                       sign == '+' ? Sign::Positive : Sign::Negative);
    return out;
}

std::string duple_to_string(const Duple& d, const ConstantUniverse& u) {
    std::string s;
    bool first = true;
    d.left.constants().for_each([&](std::size_t c) {
        if (!first) s += "⊙";
        s += u.name(c);
        first = false;
    });
    s += d.sign == Sign::Positive ? " ≤ " : " ≰ ";
    first = true;
    d.right.constants().for_each([&](std::size_t c) {
        if (!first) s += "⊙";
        s += u.name(c);
        first = false;
    });
    return s;
}

struct TrainedTask {
    UniversePtr universe;
    AxiomSet axioms{1};
    std::vector<std::uint32_t> label_constants;
    ImageEmbeddingSpec image_spec;  // valid for image tasks
    bool has_images = false;
};

TrainedTask build_vertical_bar_task(std::size_t n, std::size_t counterexamples,
                                    std::uint64_t seed) {
    TrainedTask task;
    auto data = generate_vertical_bar_dataset(n, false);
    std::mt19937_64 rng(seed);
    auto negs = sample_vertical_bar_counterexamples(n, counterexamples, rng);
    task.image_spec = data.spec;
    task.has_images = true;
    task.universe = data.spec.make_universe();
    task.axioms = vertical_bar_axioms(data.spec, data.positives, negs);
    task.label_constants = {data.spec.label_constant(0)};
    return task;
}

TrainedTask build_mnist_task(const std::string& images_path, const std::string& labels_path,
                             std::size_t limit, std::uint8_t threshold) {
    auto imgs = read_idx_images(images_path);
    auto labels = read_idx_labels(labels_path);
    if (imgs.count != labels.size())
        throw std::runtime_error("image/label counts differ");
    std::size_t n = limit ? std::min(limit, imgs.count) : imgs.count;

    TrainedTask task;
    task.image_spec.height = imgs.rows;
    task.image_spec.width = imgs.cols;
    for (int d = 0; d < 10; ++d) task.image_spec.labels.push_back("digit" + std::to_string(d));
    task.has_images = true;
    task.universe = task.image_spec.make_universe();

    std::vector<Term> terms;
    std::vector<std::uint32_t> classes;
    for (std::size_t i = 0; i < n; ++i) {
        terms.push_back(embed_thresholded_image(task.image_spec, imgs.image(i), threshold));
        classes.push_back(labels[i]);
    }
    task.axioms = build_classification_axioms(task.image_spec, terms, classes);
    for (std::size_t c = 0; c < 10; ++c)
        task.label_constants.push_back(task.image_spec.label_constant(c));
    return task;
}

void save_run(const std::string& out_dir, const TrainState& state, const TrainConfig& cfg,
              const std::vector<std::uint32_t>& labels, const std::string& progress) {
    fs::create_directories(out_dir);
    json j = checkpoint_to_json(state, cfg);
    j["labels"] = labels;
    std::ofstream ck(out_dir + "/checkpoint.json");
    ck << j.dump(2) << '\n';
    std::ofstream csv(out_dir + "/progress.csv");
    csv << "batch,duples,master_size,union_size,training_errors,dual_size,lambda_size,load\n"
        << progress;
}

int cmd_train(const std::string& task_name, std::size_t n, std::size_t counterexamples,
              const std::string& train_images, const std::string& train_labels,
              std::size_t limit, const std::string& axioms_path, const CommonTrainArgs& args,
              const std::string& out_dir, std::size_t jobs) {
    TrainConfig cfg = resolve_config(args);
    TrainedTask task;
    if (task_name == "vertical-bar") {
        task = build_vertical_bar_task(n, counterexamples, cfg.rng_seed);
    } else if (task_name == "mnist") {
        task = build_mnist_task(train_images, train_labels, limit, 128);
    } else if (task_name == "axioms") {
        auto parsed = parse_axiom_file(axioms_path);
        task.universe = parsed.universe;
        task.axioms = std::move(parsed.axioms);
        cfg.full_batch = true;
    } else {
        throw std::runtime_error("unknown task: " + task_name);
    }

    std::ostringstream progress;
    TrainState merged;
    bool first_replica = true;
    for (std::size_t job = 0; job < std::max<std::size_t>(1, jobs); ++job) {
        TrainConfig replica_cfg = cfg;
        replica_cfg.rng_seed = cfg.rng_seed + job;
        TrainState state;
        try {
            state = train(task.universe, task.axioms, replica_cfg, std::nullopt,
                          [&](const BatchProgress& p) {
                              progress << p.batch_index << ',' << p.batch_duples << ','
                                       << p.master_size << ',' << p.union_size << ','
                                       << p.training_errors << ',' << p.dual_size << ','
                                       << p.lambda_size << ',' << fmt(p.union_load) << '\n';
                              std::cout << "batch " << p.batch_index << ": master "
                                        << p.master_size << ", union " << p.union_size
                                        << ", errors " << p.training_errors << '\n';
                          });
        } catch (const InconsistencyError& e) {
            std::cerr << "inconsistent axioms in batch " << e.batch_index << ": "
                      << duple_to_string(e.duple, *task.universe) << '\n';
            return kExitInconsistent;
        }
        if (first_replica) {
            merged = std::move(state);
            first_replica = false;
        } else {
            // replicas merge by atom-set union
            AtomizedModel u = merged.union_model;
            for (const auto& a : state.union_model.atoms()) u.add(a);
            merged.union_model = std::move(u);
            merged.global_step += state.global_step;
        }
    }

    save_run(out_dir, merged, cfg, task.label_constants, progress.str());
    std::cout << "final: master " << merged.master.size() << " atoms, union "
              << merged.union_model.size() << " atoms, load "
              << fmt(union_load(merged.union_model, merged.global_step)) << '\n';
    std::cout << "checkpoint written to " << out_dir << "/checkpoint.json\n";
    return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& test_images,
             const std::string& test_labels, std::size_t test_limit,
             const std::string& train_images, const std::string& train_labels,
             std::size_t train_limit, bool select, bool head, std::size_t epochs,
             double lr, const std::string& metrics_out) {
    auto ck = load_checkpoint(checkpoint_path);
    json raw;
    {
        std::ifstream in(checkpoint_path);
        in >> raw;
    }
    std::vector<std::uint32_t> labels =
        raw.value("labels", std::vector<std::uint32_t>{});
    if (labels.empty()) throw std::runtime_error("checkpoint has no label constants");

    auto imgs = read_idx_images(test_images);
    auto lab = read_idx_labels(test_labels);
    if (imgs.count != lab.size()) throw std::runtime_error("image/label counts differ");
    std::size_t n = test_limit ? std::min(test_limit, imgs.count) : imgs.count;

    ImageEmbeddingSpec spec;
    spec.height = imgs.rows;
    spec.width = imgs.cols;
    for (std::size_t c = 0; c < labels.size(); ++c)
        spec.labels.push_back("label" + std::to_string(c));
    if (spec.num_constants() != ck.state.union_model.num_constants())
        throw std::runtime_error("test images do not match the checkpoint universe");

    AtomizedModel model = ck.state.union_model;
    TrainedTask train_task;
    bool have_train = !train_images.empty();
    if (have_train)
        train_task = build_mnist_task(train_images, train_labels, train_limit, 128);

    std::mt19937_64 rng(ck.config.rng_seed);
    if (select) {
        if (!have_train)
            throw std::runtime_error("--select needs --train-images/--train-labels");
        model = select_atom_subset(model, train_task.axioms,
                                   train_task.axioms.negative_ids(),
                                   ck.config.subset_fraction, labels, rng);
        std::cout << "selected subset: " << model.size() << " atoms\n";
    }

    LogisticHead lh;
    if (head) {
        if (!have_train) throw std::runtime_error("--head needs --train-images/--train-labels");
        std::vector<std::vector<double>> xs;
        std::vector<std::uint32_t> ys;
        auto groups = train_task.axioms.groups_by_right_term();
        auto t_imgs = read_idx_images(train_images);
        auto t_lab = read_idx_labels(train_labels);
        std::size_t tn = train_limit ? std::min(train_limit, t_imgs.count) : t_imgs.count;
        for (std::size_t i = 0; i < tn; ++i) {
            Term t = embed_thresholded_image(train_task.image_spec, t_imgs.image(i), 128);
            xs.push_back(atom_activations(model, t));
            ys.push_back(t_lab[i]);
        }
        lh = train_logistic_head(xs, ys, labels.size(), epochs, lr);
    }

    std::size_t correct_fm = 0, correct_head = 0;
    std::vector<std::size_t> per_class_total(labels.size(), 0),
        per_class_correct(labels.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        Term t = embed_thresholded_image(spec, imgs.image(i), 128);
        std::size_t predicted = classify_fewest_misses(model, labels, t);
        ++per_class_total[lab[i]];
        if (predicted == lab[i]) {
            ++correct_fm;
            ++per_class_correct[lab[i]];
        }
        if (head && logistic_predict(lh, atom_activations(model, t)) == lab[i])
            ++correct_head;
    }

    double acc = static_cast<double>(correct_fm) / n;
    std::cout << "fewest-misses accuracy: " << fmt(100.0 * acc) << "% (" << correct_fm
              << "/" << n << ")\n";
    if (head)
        std::cout << "logistic-head accuracy: " << fmt(100.0 * correct_head / n) << "%\n";

    if (!metrics_out.empty()) {
        std::ofstream csv(metrics_out);
        csv << "class,total,correct,accuracy\n";
        for (std::size_t c = 0; c < labels.size(); ++c) {
            double a = per_class_total[c]
                           ? static_cast<double>(per_class_correct[c]) / per_class_total[c]
                           : 0.0;
            csv << c << ',' << per_class_total[c] << ',' << per_class_correct[c] << ','
                << fmt(a) << '\n';
        }
        csv << "overall," << n << ',' << correct_fm << ',' << fmt(acc) << '\n';
    }
    return kExitOk;
}

int cmd_hamiltonian(const std::string& graph_path, const CommonTrainArgs& args,
                    std::size_t max_attempts, bool feedback, const std::string& out_dir) {
    GraphSpec graph = read_edge_list(graph_path);
    HamiltonianEmbedding emb(graph);
    AxiomSet axioms = emb.axioms;

    TrainConfig cfg = resolve_config(args);
    cfg.full_batch = true;
    cfg.simplification_threshold =
        args.gamma > 0 ? args.gamma : 1.1;  // formal-problem default
    cfg.dual_min_duple_fraction = args.kappa >= 0 ? args.kappa : 0.5;
    cfg.stop_on_zero_training_error = false;

    TrainState state;
    state.master = freest_empty_model(emb.universe);
    state.union_model = state.master;
    std::mt19937_64 rng(cfg.rng_seed);

    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        try {
            train_one_batch(state, axioms, full_batch(axioms), cfg, rng);
        } catch (const InconsistencyError& e) {
            std::cerr << "axioms became inconsistent at attempt " << attempt << ": "
                      << duple_to_string(e.duple, *emb.universe) << '\n';
            return kExitInconsistent;
        }
        auto path = interpret_path(state.master, emb);
        if (path.hamiltonian_cycle) {
            std::cout << "cycle found after " << attempt << " attempts:";
            for (auto k : path.edges)
                std::cout << ' ' << (graph.edges[k].first + 1) << '-'
                          << (graph.edges[k].second + 1);
            std::cout << '\n';
            if (!out_dir.empty()) save_run(out_dir, state, cfg, {}, "");
            return kExitOk;
        }
        if (feedback && !path.edges.empty()) {
            // feed back edge sets that provably cannot extend to a full
            // cycle: a vertex of degree > 2, or a closed loop shorter than v
            std::vector<std::size_t> degree(graph.num_nodes, 0);
            std::vector<std::vector<std::uint32_t>> adj(graph.num_nodes);
            for (auto k : path.edges) {
                auto [a, b] = graph.edges[k];
                ++degree[a];
                ++degree[b];
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
            bool dead = false;
            for (auto d : degree)
                if (d > 2) dead = true;
            if (!dead && path.edges.size() < graph.num_nodes) {
                // components are paths or cycles; any cycle here is short
                std::vector<int> comp(graph.num_nodes, -1);
                int ncomp = 0;
                for (std::size_t s = 0; s < graph.num_nodes; ++s) {
                    if (comp[s] >= 0 || degree[s] == 0) continue;
                    std::vector<std::size_t> stack{s};
                    comp[s] = ncomp;
                    std::size_t vertices = 0;
                    while (!stack.empty()) {
                        auto v = stack.back();
                        stack.pop_back();
                        ++vertices;
                        for (auto w : adj[v])
                            if (comp[w] < 0) {
                                comp[w] = ncomp;
                                stack.push_back(w);
                            }
                    }
                    std::size_t edges_in = 0;
                    for (auto k : path.edges)
                        if (comp[graph.edges[k].first] == ncomp) ++edges_in;
                    if (edges_in == vertices) dead = true;  // closed loop
                    ++ncomp;
                }
            }
            if (dead) add_unwanted_path(axioms, emb, path.edges);
        }
    }
    std::cerr << "no cycle within " << max_attempts << " attempts\n";
    return kExitBudget;
}

int cmd_inspect(const std::string& checkpoint_path) {
    auto ck = load_checkpoint(checkpoint_path);
    json raw;
    {
        std::ifstream in(checkpoint_path);
        in >> raw;
    }
    std::vector<std::uint32_t> labels = raw.value("labels", std::vector<std::uint32_t>{});

    const auto& u = *ck.state.union_model.universe();
    std::cout << "union model: " << ck.state.union_model.size() << " atoms over "
              << u.size() << " constants\n";
    std::cout << "master model: " << ck.state.master.size() << " atoms\n";
    std::cout << "crossings performed: " << ck.state.global_step << "\n\natom sizes:\n";
    for (auto [size, count] : atom_size_histogram(ck.state.union_model))
        std::cout << "  " << size << ": " << count << '\n';

    for (auto lc : labels) {
        std::cout << "\natoms under " << u.name(lc) << ":\n";
        std::size_t shown = 0;
        for (const auto& a : ck.state.union_model.atoms()) {
            if (!a.upper.test(lc)) continue;
            if (++shown > 20) {
                std::cout << "  ...\n";
                break;
            }
            std::cout << "  [";
            bool first = true;
            a.upper.for_each([&](std::size_t c) {
                if (!first) std::cout << ", ";
                std::cout << u.name(c);
                first = false;
            });
            std::cout << "]\n";
        }
        if (shown == 0) std::cout << "  (none)\n";
    }

    std::cout << "\nload L = "
              << fmt(union_load(ck.state.union_model, ck.state.global_step)) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"atomized semilattice learning engine"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model from a task");
    std::string task = "vertical-bar", train_images, train_labels, axioms_path, out_dir = "run";
    std::size_t n = 4, counterexamples = 2000, limit = 0, jobs = 1;
    CommonTrainArgs targs;
    train_cmd->add_option("--task", task, "vertical-bar | mnist | axioms");
    train_cmd->add_option("--n", n, "vertical-bar image side");
    train_cmd->add_option("--counterexamples", counterexamples,
                          "random counterexamples for vertical-bar");
    train_cmd->add_option("--train-images", train_images, "IDX image file");
    train_cmd->add_option("--train-labels", train_labels, "IDX label file");
    train_cmd->add_option("--limit", limit, "use only the first N examples");
    train_cmd->add_option("--axioms", axioms_path, "hand-written axioms file");
    train_cmd->add_option("--out", out_dir, "output directory");
    train_cmd->add_option("--jobs", jobs, "seeded replicas merged by atom union");
    train_cmd->add_option("--config", targs.config_path, "key=value config file");
    train_cmd->add_option("--gamma", targs.gamma, "simplification threshold");
    train_cmd->add_option("--kappa", targs.kappa, "dual duple fraction");
    train_cmd->add_option("--delta", targs.delta, "subset selection fraction");
    train_cmd->add_option("--max-batches", targs.max_batches);
    train_cmd->add_option("--batch-start", targs.batch_start);
    train_cmd->add_option("--batch-ramp", targs.batch_ramp);
    train_cmd->add_option("--seed", targs.seed, "rng seed");
    train_cmd->add_flag("--full-batch{1}", targs.full_batch, "whole axiom set per batch");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a test set");
    std::string checkpoint, test_images, test_labels, eval_train_images, eval_train_labels,
        metrics_out;
    std::size_t test_limit = 0, eval_train_limit = 0, epochs = 200;
    double lr = 0.05;
    bool select = false, head = false;
    eval_cmd->add_option("--checkpoint", checkpoint)->required();
    eval_cmd->add_option("--test-images", test_images)->required();
    eval_cmd->add_option("--test-labels", test_labels)->required();
    eval_cmd->add_option("--test-limit", test_limit);
    eval_cmd->add_option("--train-images", eval_train_images,
                         "training IDX images (for --select / --head)");
    eval_cmd->add_option("--train-labels", eval_train_labels);
    eval_cmd->add_option("--train-limit", eval_train_limit);
    eval_cmd->add_flag("--select", select, "discriminative subset selection first");
    eval_cmd->add_flag("--head", head, "fit a logistic head on the training set");
    eval_cmd->add_option("--epochs", epochs);
    eval_cmd->add_option("--lr", lr);
    eval_cmd->add_option("--out", metrics_out, "metrics CSV path");

    // hamiltonian
    auto* ham_cmd = app.add_subcommand("hamiltonian", "search for a Hamiltonian cycle");
    std::string graph_path, ham_out;
    std::size_t max_attempts = 300;
    bool feedback = false;
    CommonTrainArgs hargs;
    ham_cmd->add_option("--graph", graph_path, "edge list: 'v e' then 1-based pairs")
        ->required();
    ham_cmd->add_option("--max-attempts", max_attempts);
    ham_cmd->add_flag("--feedback", feedback, "feed dead-end paths back as axioms");
    ham_cmd->add_option("--out", ham_out, "checkpoint directory on success");
    ham_cmd->add_option("--config", hargs.config_path);
    ham_cmd->add_option("--gamma", hargs.gamma);
    ham_cmd->add_option("--kappa", hargs.kappa);
    ham_cmd->add_option("--seed", hargs.seed);

    // inspect
    auto* inspect_cmd = app.add_subcommand("inspect", "print checkpoint contents");
    std::string inspect_path;
    inspect_cmd->add_option("--checkpoint", inspect_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed())
            return cmd_train(task, n, counterexamples, train_images, train_labels, limit,
                             axioms_path, targs, out_dir, jobs);
        if (eval_cmd->parsed())
            return cmd_eval(checkpoint, test_images, test_labels, test_limit,
                            eval_train_images, eval_train_labels, eval_train_limit, select,
                            head, epochs, lr, metrics_out);
        if (ham_cmd->parsed())
            return cmd_hamiltonian(graph_path, hargs, max_attempts, feedback, ham_out);
        if (inspect_cmd->parsed()) return cmd_inspect(inspect_path);
    } catch (const InconsistencyError& e) {
        std::cerr << "error: inconsistent axioms\n";
        return kExitInconsistent;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
