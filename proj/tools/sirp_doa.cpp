// SPDX-License-Identifier: Apache-2.0
//
// sirp-doa: direction finding for MIMO radar in compound-Gaussian clutter
// Copyright (C) 2026 The sirp-doa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


// Command-line front end: bound curves, single trials and full sweeps.

#include "sirp/config_io.hpp"
#include "sirp/crb.hpp"
#include "sirp/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace {

struct Options
{
    std::string config_path;
    std::string out_path;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string estimators;
    std::string iterations;
    bool quiet = false;
    std::size_t point = 0;
    std::size_t trial = 0;
};

std::vector<std::string> split(const std::string& list)
{
    std::vector<std::string> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

sirp::ExperimentConfig build_config(const Options& opt)
{
    sirp::ExperimentConfig c = opt.config_path.empty()
                                   ? sirp::ExperimentConfig::paper_defaults(sirp::TextureKind::KDistributed)
                                   : sirp::load_config(opt.config_path);
    if (opt.trials)
        c.trials = *opt.trials;
    if (opt.seed)
        c.base_seed = *opt.seed;
    if (opt.threads)
        c.threads = *opt.threads;
    if (!opt.estimators.empty()) {
        c.estimators.clear();
        for (const auto& name : split(opt.estimators)) {
            try {
                c.estimators.push_back({sirp::canonical_estimator_name(name), {2}});
            } catch (const std::invalid_argument& e) {
                throw sirp::ConfigError("--estimators", e.what());
            }
        }
    }
    if (!opt.iterations.empty()) {
        std::vector<int> its;
        for (const auto& s : split(opt.iterations)) {
            try {
                std::size_t used = 0;
                its.push_back(std::stoi(s, &used));
                if (used != s.size())
                    throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw sirp::ConfigError("--iterations", "'" + s + "' is not an integer");
            }
        }
        for (auto& e : c.estimators)
            e.iterations = its;
    }
    if (!opt.out_path.empty())
        c.output_path = opt.out_path;
    try {
        c.validate();
    } catch (const std::exception& e) {
        throw sirp::ConfigError("", e.what());
    }
    return c;
}

// Runs `body` with a stream bound to the output path, or stdout if empty.
template <class F>
void with_output(const std::string& path, F&& body)
{
    if (path.empty()) {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    body(out);
    if (!out)
        throw std::runtime_error("error while writing '" + path + "'");
}

void run_crb(const Options& opt)
{
    const auto c = build_config(opt);
    with_output(c.output_path, [&](std::ostream& os) { sirp::write_crb_csv(os, c); });
}

void run_sweep(const Options& opt)
{
    const auto c = build_config(opt);
    sirp::SweepProgress progress;
    if (!opt.quiet) {
        progress = [&c](std::size_t point, int done) {
            std::fprintf(stderr, "\r%s = %g: %d/%d trials", std::string(sirp::to_string(c.axis)).c_str(),
                         c.sweep_values[point], done, c.trials);
            if (done == c.trials)
                std::fputc('\n', stderr);
            std::fflush(stderr);
        };
    }
    const auto result = sirp::sweep(c, progress);
    with_output(c.output_path, [&](std::ostream& os) { sirp::write_sweep_csv(os, result); });
}

void run_simulate(const Options& opt)
{
    const auto c = build_config(opt);
    if (opt.point >= c.sweep_values.size())
        throw sirp::ConfigError("--point", "index past the end of the sweep list");
    const auto trial = sirp::run_trial(c, opt.point, opt.trial);
    with_output(c.output_path, [&](std::ostream& os) {
        os << "estimator,iteration,target,dod_deg,doa_deg,log_likelihood,flags,failure\n";
        for (std::size_t k = 0; k < trial.truth.size(); ++k)
            os << "truth,,"  << k << ',' << sirp::format_value(sirp::rad2deg(trial.truth[k].dod)) << ','
               << sirp::format_value(sirp::rad2deg(trial.truth[k].doa)) << ",,,\n";
        for (const auto& e : trial.estimators) {
            if (e.failed) {
                std::string msg = e.failure;
                for (char& ch : msg)
                    if (ch == ',' || ch == '\n')
                        ch = ' ';
                os << e.name << ",,,,,,," << msg << '\n';
                continue;
            }
            const auto& its = e.result.iterations;
            for (std::size_t i = 0; i < its.size(); ++i)
                for (std::size_t k = 0; k < its[i].theta.size(); ++k)
                    os << e.name << ',' << i << ',' << k << ','
                       << sirp::format_value(sirp::rad2deg(its[i].theta[k].dod)) << ','
                       << sirp::format_value(sirp::rad2deg(its[i].theta[k].doa)) << ','
                       << sirp::format_value(its[i].log_likelihood) << ',' << e.result.flags << ",\n";
        }
    });
}

void add_common(CLI::App* sub, Options& opt)
{
    sub->add_option("--config", opt.config_path, "Experiment file (JSON); built-in K-clutter setup if omitted");
    sub->add_option("--out", opt.out_path, "CSV output path (stdout if omitted)");
    sub->add_option("--seed", opt.seed, "Base seed");
    sub->add_option("--estimators", opt.estimators, "Comma list, e.g. IMMLE,ICvMLE,MUSIC-SCM");
    sub->add_option("--iterations", opt.iterations, "Comma list of iteration counts to score");
    sub->add_flag("--quiet", opt.quiet, "No progress output");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Direction finding for MIMO radar in compound-Gaussian clutter"};
    app.require_subcommand(1);
    Options opt;

    auto* crb = app.add_subcommand("crb", "Write the bound curve over the sweep axis");
    add_common(crb, opt);

    auto* sim = app.add_subcommand("simulate", "Run one trial and dump every iterate");
    add_common(sim, opt);
    sim->add_option("--point", opt.point, "Sweep point index");
    sim->add_option("--trial", opt.trial, "Trial index");

    auto* sw = app.add_subcommand("sweep", "Full Monte Carlo sweep");
    add_common(sw, opt);
    sw->add_option("--trials", opt.trials, "Trials per sweep point");
    sw->add_option("--threads", opt.threads, "Worker threads (0: one per core)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*crb)
            run_crb(opt);
        else if (*sim)
            run_simulate(opt);
        else
            run_sweep(opt);
    } catch (const sirp::ConfigError& e) {
        std::cerr << "sirp-doa: config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "sirp-doa: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
