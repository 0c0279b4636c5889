// Command-line driver for the accuracy experiments.
//
//   kcomp root-neighborhood [--k 1,2,3] [--points 401] [--out file.csv]
//   kcomp condition-sweep   [--k 1,2,3,4] [--points 86] [--out file.csv]
//   kcomp cubic-compare     [--k 2,3] [--points 401] [--out file.csv]
//   kcomp table1            [--out file.txt]
//   kcomp flops             [--out file.csv]
//
// Exit status is 0 on success and 1 when an embedded regression check fails.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <kcomp/experiments.hpp>

namespace {

namespace ex = kcomp::experiments;

struct options {
    std::vector<int> k_list;
    std::size_t points = 0;
    std::string out;
    std::string format = "csv";
};

class output {
public:
    explicit output(const std::string& path)
    {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw std::runtime_error("cannot open output file: " + path);
        }
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }

    void finish()
    {
        stream().flush();
        if (!stream())
            throw std::runtime_error("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

ex::experiment_config to_config(const options& o)
{
    ex::experiment_config cfg;
    cfg.k_list = o.k_list;
    if (o.points != 0)
        cfg.points = o.points;
    cfg.validate();
    return cfg;
}

int emit_sweep(const options& o,
               const std::function<std::vector<ex::sweep_record>(const ex::experiment_config&)>& run)
{
    const auto rows = run(to_config(o));
    output out(o.out);
    ex::write_csv(out.stream(), rows);
    out.finish();
    return 0;
}

void add_sweep_flags(CLI::App* cmd, options& o)
{
    cmd->add_option("--k", o.k_list, "Comma-separated K values (1..8)")->delimiter(',');
    cmd->add_option("--points", o.points, "Number of evaluation points")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output path (default stdout)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"K-compensated de Casteljau accuracy experiments"};
    app.require_subcommand(1);
    options o;

    auto* root = app.add_subcommand("root-neighborhood",
                                    "(s-1)(s-3/4)^7 near its multiple root 3/4");
    auto* sweep = app.add_subcommand("condition-sweep",
                                     "Relative error against condition number at 3/4 - 1.3^j");
    auto* cubic = app.add_subcommand("cubic-compare",
                                     "Horner vs de Casteljau on (2s-1)^3; compensated on (2s-1)^3(s-1)");
    auto* table = app.add_subcommand("table1", "Trace of the K = 2 evaluation at 1/2 + 1001u");
    auto* flops = app.add_subcommand("flops", "Closed-form vs instrumented flop counts");
    for (auto* cmd : {root, sweep, cubic})
        add_sweep_flags(cmd, o);
    for (auto* cmd : {table, flops}) {
        cmd->add_option("--out", o.out, "Output path (default stdout)");
        cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv"}));
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (root->parsed())
            return emit_sweep(o, ex::run_root_neighborhood);
        if (sweep->parsed())
            return emit_sweep(o, ex::run_condition_sweep);
        if (cubic->parsed())
            return emit_sweep(o, ex::run_cubic_comparison);
        if (table->parsed()) {
            const auto rep = ex::run_table1();
            output out(o.out);
            ex::write_table1(out.stream(), rep);
            out.finish();
            if (!rep.ok()) {
                std::cerr << "table1: trace does not match the closed forms\n";
                return 1;
            }
            return 0;
        }
        if (flops->parsed()) {
            const auto rows = ex::run_flop_report();
            output out(o.out);
            ex::write_flop_report(out.stream(), rows);
            out.finish();
            bool ok = true;
            for (const auto& r : rows) {
                if (!r.ok()) {
                    ok = false;
                    std::cerr << "flops: n=" << r.n << " K=" << r.k << " expected " << r.formula
                              << ", counted " << r.instrumented << '\n';
                }
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "kcomp: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
