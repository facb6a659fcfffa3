// Command-line front end: hierarchical partitions of the unit square,
// slack box partitions, ultrametric embeddings, instance generators, and
// validators. Exit codes: 0 success, 1 usage/input error, 2 internal error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fatpart/generators.hpp"
#include "fatpart/hierarchy.hpp"
#include "fatpart/io.hpp"
#include "fatpart/metric.hpp"
#include "fatpart/partition.hpp"
#include "fatpart/slack.hpp"
#include "fatpart/ultrametric.hpp"

namespace {

using namespace fatpart;

// Directories are ingested as weight-by-file-size trees, files as JSON.
WeightedTree load_tree(const std::string& input) {
    if (std::filesystem::is_directory(input)) return scan_filesystem(input);
    return parse_tree(read_file(input));
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

struct PartitionArgs {
    std::string input;
    std::string method = "greedy";
    std::string json_out, svg_out;
    bool outlines = false;
    PartitionConfig cfg;
};

int cmd_partition(const PartitionArgs& args) {
    const auto method = parse_method(args.method);
    if (!method) throw PreconditionViolated("unknown method: " + args.method);
    const WeightedTree tree = load_tree(args.input);
    const BinaryTree binary = to_binary(tree);
    const PolygonalPartition part = partition(binary, *method, args.cfg);
    if (!args.json_out.empty()) write_file(args.json_out, write_partition_json(binary, part));
    if (!args.svg_out.empty()) {
        write_file(args.svg_out, write_partition_svg(binary, part, args.outlines));
    }
    const PartitionStats s = stats(part);
    std::cout << "avg=" << format_double(s.avg_aspect_ratio)
              << " max=" << format_double(s.max_aspect_ratio) << "\n";
    return 0;
}

struct SlackArgs {
    std::string input;
    std::string json_out;
    SlackConfig cfg;
};

int cmd_slack(const SlackArgs& args) {
    const WeightedTree tree = load_tree(args.input);
    const SlackPartition part = slack_partition(tree, args.cfg);
    if (!args.json_out.empty()) write_file(args.json_out, write_slack_json(tree, part));
    double worst = 1.0;
    for (const HyperRect& r : part.rects) worst = std::max(worst, rect_aspect_ratio(r));
    std::cout << "boxes=" << part.rects.size() << " max=" << format_double(worst) << "\n";
    return 0;
}

struct EmbedArgs {
    std::string input;
    std::string points_out, report_out;
    int dim = 2;
};

int cmd_embed(const EmbedArgs& args) {
    const MetricSpace m = read_metric_csv(read_file(args.input));
    const EmbeddingResult result = embed(m, args.dim);
    if (!args.points_out.empty()) {
        write_file(args.points_out, write_points_csv(m.names, result.points));
    }
    if (!args.report_out.empty()) write_file(args.report_out, write_report_json(result.report));
    std::cout << "distortion=" << format_double(result.report.distortion)
              << " lower_bound=" << format_double(result.report.lower_bound)
              << " ratio=" << format_double(result.report.ratio) << "\n";
    return 0;
}

struct GenArgs {
    std::string kind = "hierarchy";
    std::string out;
    std::string law = "pareto";
    int depth = 8;
    std::uint64_t seed = 42;
    std::size_t leaves = 100;
    std::size_t points = 16;
    int levels = 3;
};

int cmd_gen(const GenArgs& args) {
    if (args.kind == "lowerbound") {
        emit(args.out, write_tree_json(lowerbound_tree(args.depth)));
        return 0;
    }
    if (args.kind == "hierarchy") {
        WeightLaw law;
        if (args.law == "pareto") {
            law = WeightLaw::pareto;
        } else if (args.law == "uniform") {
            law = WeightLaw::uniform;
        } else {
            throw PreconditionViolated("unknown weight law: " + args.law);
        }
        emit(args.out, write_tree_json(random_hierarchy(args.seed, args.leaves, args.depth, law)));
        return 0;
    }
    if (args.kind == "ultrametric") {
        emit(args.out, write_metric_csv(random_ultrametric(args.seed, args.points, args.levels)));
        return 0;
    }
    throw PreconditionViolated("unknown kind: " + args.kind);
}

struct StatsArgs {
    std::string input;
};

int cmd_stats(const StatsArgs& args) {
    const LoadedPartition loaded = read_partition_json(read_file(args.input));
    PolygonalPartition part;
    part.method = loaded.method;
    for (const auto& e : loaded.entries) {
        part.polygons.push_back(e.polygon);
        part.depths.push_back(e.depth);
    }
    const PartitionStats s = stats(part);
    std::cout << "avg=" << format_double(s.avg_aspect_ratio)
              << " max=" << format_double(s.max_aspect_ratio) << "\n";
    return 0;
}

struct ValidateArgs {
    std::string input;
    std::string kind = "hierarchy";
};

int cmd_validate(const ValidateArgs& args) {
    if (args.kind == "hierarchy") {
        const WeightedTree tree = load_tree(args.input);
        std::size_t leaves = 0;
        for (const TreeNode& n : tree.nodes) leaves += n.is_leaf() ? 1 : 0;
        std::cout << "ok kind=hierarchy nodes=" << tree.node_count() << " leaves=" << leaves
                  << " depth=" << depth(tree) << "\n";
        return 0;
    }
    if (args.kind == "metric") {
        const MetricSpace m = read_metric_csv(read_file(args.input));
        std::cout << "ok kind=metric points=" << m.size()
                  << " ultrametric=" << (validate_ultrametric(m) ? "yes" : "no") << "\n";
        return 0;
    }
    if (args.kind == "partition") {
        const LoadedPartition loaded = read_partition_json(read_file(args.input));
        std::cout << "ok kind=partition method=" << method_name(loaded.method)
                  << " entries=" << loaded.entries.size() << "\n";
        return 0;
    }
    throw PreconditionViolated("unknown kind: " + args.kind);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounded-aspect-ratio partitions: polygonal treemaps of the unit square, "
                 "slack box partitions, and low-distortion ultrametric embeddings"};
    app.require_subcommand(1);

    PartitionArgs pa;
    CLI::App* partition_cmd =
        app.add_subcommand("partition", "Partition the unit square for a weighted hierarchy");
    partition_cmd->add_option("--input", pa.input, "Hierarchy JSON file or directory to scan")
        ->required();
    partition_cmd->add_option("--method", pa.method, "angular | greedy | random | greedy-rect");
    partition_cmd->add_option("--json", pa.json_out, "Write the partition as JSON");
    partition_cmd->add_option("--svg", pa.svg_out, "Render the leaf cells as SVG");
    partition_cmd->add_flag("--outlines", pa.outlines, "Include internal-node outlines in the SVG");
    partition_cmd->add_option("--seed", pa.cfg.seed, "Seed for the random method");
    partition_cmd->add_option("--theta-samples", pa.cfg.theta_samples,
                              "Number of candidate orientations for greedy");
    partition_cmd->add_option("--threads", pa.cfg.threads, "Worker threads (same result)");

    SlackArgs sa;
    CLI::App* slack_cmd =
        app.add_subcommand("slack", "Partition a box into boxes with bounded aspect ratio");
    slack_cmd->add_option("--input", sa.input, "Hierarchy JSON file or directory to scan")
        ->required();
    slack_cmd->add_option("--epsilon", sa.cfg.epsilon, "Slack fraction, in (0, 1/3)")->required();
    slack_cmd->add_option("--dim", sa.cfg.dim, "Ambient dimension, at least 2")->required();
    slack_cmd->add_option("--json", sa.json_out, "Write the box partition as JSON");

    EmbedArgs ea;
    CLI::App* embed_cmd =
        app.add_subcommand("embed", "Embed an ultrametric into euclidean space");
    embed_cmd->add_option("--input", ea.input, "Distance-matrix CSV")->required();
    embed_cmd->add_option("--dim", ea.dim, "Target dimension, at least 2")->required();
    embed_cmd->add_option("--points", ea.points_out, "Write the embedded points as CSV");
    embed_cmd->add_option("--report", ea.report_out, "Write the distortion report as JSON");

    GenArgs ga;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate test instances");
    gen_cmd->add_option("--kind", ga.kind, "lowerbound | hierarchy | ultrametric")->required();
    gen_cmd->add_option("--depth", ga.depth, "Tree depth (lowerbound, hierarchy)");
    gen_cmd->add_option("--seed", ga.seed, "Random seed");
    gen_cmd->add_option("--leaves", ga.leaves, "Leaf count (hierarchy)");
    gen_cmd->add_option("--law", ga.law, "Leaf weight law: pareto | uniform");
    gen_cmd->add_option("--points", ga.points, "Point count (ultrametric)");
    gen_cmd->add_option("--levels", ga.levels, "Separation levels (ultrametric)");
    gen_cmd->add_option("--out", ga.out, "Output file (default: stdout)");

    StatsArgs ta;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Recompute statistics of a partition JSON");
    stats_cmd->add_option("--input", ta.input, "Partition JSON")->required();

    ValidateArgs va;
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check an input file");
    validate_cmd->add_option("--input", va.input, "File to check")->required();
    validate_cmd->add_option("--kind", va.kind, "hierarchy | metric | partition");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (partition_cmd->parsed()) return cmd_partition(pa);
        if (slack_cmd->parsed()) return cmd_slack(sa);
        if (embed_cmd->parsed()) return cmd_embed(ea);
        if (gen_cmd->parsed()) return cmd_gen(ga);
        if (stats_cmd->parsed()) return cmd_stats(ta);
        if (validate_cmd->parsed()) return cmd_validate(va);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const fatpart::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const fatpart::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
