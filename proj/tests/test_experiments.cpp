#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/report.hpp"
#include "lowrank/text_io.hpp"

using namespace lowrank;

TEST_CASE("substreams are distinct and stable") {
    CHECK(substream(1, "data") != substream(1, "noise"));
    CHECK(substream(1, "trial", 0) != substream(1, "trial", 1));
    CHECK(substream(1, "trial", 0) != substream(2, "trial", 0));
    CHECK(substream(7, "data", 3) == substream(7, "data", 3));
    CHECK(mix64(0) != 0);
}

TEST_CASE("gen_var fidelity") {
    VarConfig cfg;
    cfg.n = 20;
    cfg.p = 60;
    cfg.rank = 4;
    cfg.noise = 0.05;
    cfg.seed = 12;
    const VarData d = gen_var(cfg);
    CHECK(d.Phi.rows() == 60);
    CHECK(d.Y.cols() == 20);
    CHECK(numerical_rank(d.B, 1e-10) == 4);
    const double sr = Eigen::EigenSolver<Matrix>(d.B).eigenvalues().cwiseAbs().maxCoeff();
    CHECK(std::abs(sr - 0.95) < 1e-10);
    // Consecutive rows share the state: Y row k is Phi row k + 1.
    CHECK((d.Y.topRows(59) - d.Phi.bottomRows(59)).cwiseAbs().maxCoeff() == 0.0);

    const Matrix E = d.Y - d.Phi * d.B;
    const double sd = std::sqrt(E.squaredNorm() / static_cast<double>(E.size()));
    CHECK(std::abs(sd - 0.05) < 0.1 * 0.05);

    cfg.noise = 0.0;
    const VarData clean = gen_var(cfg);
    CHECK((clean.Y - clean.Phi * clean.B).cwiseAbs().maxCoeff() < 1e-12);

    cfg.rank = 20;
    CHECK_THROWS_AS(gen_var(cfg), ConfigError);
    cfg.rank = 4;
    cfg.spectral_radius = 1.0;
    CHECK_THROWS_AS(gen_var(cfg), ConfigError);
    cfg.spectral_radius = 0.95;
    cfg.p = 10;
    CHECK_THROWS_AS(gen_var(cfg), ConfigError);
}

TEST_CASE("gen_realization truth") {
    RealizationConfig cfg;
    cfg.noise = 0.0;
    const RealizationData d = gen_realization(cfg);
    REQUIRE(d.atoms.size() == 3);
    const double mods[] = {0.849, 0.922, 0.922};
    const double angs[] = {2.356, 0.219, 1.352};
    const double phases[] = {0.0, -1.107, -2.356};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(d.atoms[i].modulus == doctest::Approx(mods[i]).epsilon(1e-3));
        CHECK(d.atoms[i].angle == doctest::Approx(angs[i]).epsilon(1e-3));
        CHECK(d.atoms[i].phase == doctest::Approx(phases[i]).epsilon(1e-3));
    }
    CHECK(numerical_rank(d.X0, 1e-8) == 6);
    CHECK(d.Y == d.X0);
    CHECK(model_order(cfg) == 6);
    CHECK(d.g.size() == 99);

    // Truncated energy of the infinite response.
    const std::complex<double> q[] = {{-0.6, 0.6}, {0.9, 0.2}, {0.2, 0.9}};
    const std::complex<double> r[] = {{1, 0}, {1, -2}, {-1, -1}};
    double energy = 0.0;
    for (int k = 0; k < 5000; ++k) {
        double g = 0.0;
        for (int i = 0; i < 3; ++i) g += 2.0 * (r[i] * std::pow(q[i], k)).real();
        energy += g * g;
    }
    CHECK(impulse_energy(cfg.poles, cfg.residues) == doctest::Approx(energy).epsilon(1e-12));
    CHECK(d.d0 == doctest::Approx(1.0 / std::sqrt(energy)).epsilon(1e-12));

    cfg.noise = 0.1;
    cfg.seed = 3;
    const RealizationData n = gen_realization(cfg);
    CHECK((n.g_noisy - n.g).norm() > 0.0);
    CHECK((hankel_map(n.g_noisy, HankelSpec::make(80, 20)) - n.Y).norm() == 0.0);

    cfg.poles = {{0.5, 0.9}};
    cfg.residues = {{1, 0}};
    CHECK_THROWS_AS(gen_realization(cfg), ConfigError);
    cfg.poles = {{0.5, -0.2}};
    CHECK_THROWS_AS(gen_realization(cfg), ConfigError);
}

TEST_CASE("quantile and pole matching") {
    CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
    CHECK(quantile({4, 1, 2, 3}, 0.75) == doctest::Approx(3.25));
    CHECK_THROWS_AS(quantile({}, 0.5), ArgumentError);

    const std::vector<PoleAtom> truth{make_atom(0.9, 0.2, 0), make_atom(0.9, 1.3, 0)};
    const std::vector<PoleAtom> est{make_atom(0.88, 1.31, 0), make_atom(0.5, 3.0, 0), make_atom(0.91, 0.21, 0)};
    const std::vector<int> m = match_poles(truth, est);
    CHECK(m == std::vector<int>{2, 0});
    CHECK(match_poles(truth, {est[1]}) == std::vector<int>{-1, 0});
}

namespace {

MonteCarloOptions tiny_realization_options() {
    MonteCarloOptions o = realization_defaults();
    o.trials = 2;
    o.seed = 5;
    o.record_time = false;
    o.hankel.angle_points = 24;
    o.hankel.modulus_points = 12;
    o.lambda_count = 5;
    o.methods = {"lar", "lar-ls", "cadzow", "nuclear"};
    return o;
}

RealizationConfig small_realization() {
    RealizationConfig cfg;
    cfg.rows = 20;
    cfg.cols = 8;
    cfg.noise = 0.01;
    return cfg;
}

}  // namespace

TEST_CASE("monte carlo runs are bit-identical for the same seed") {
    VarConfig cfg;
    cfg.n = 8;
    cfg.p = 16;
    cfg.rank = 2;
    MonteCarloOptions o = var_defaults();
    o.trials = 2;
    o.seed = 9;
    o.record_time = false;
    o.lambda_count = 5;
    const MonteCarloResult a = run_var_experiment(cfg, o);
    const MonteCarloResult b = run_var_experiment(cfg, o);
    REQUIRE(a.trials.size() == 6);
    CHECK(a.trials == b.trials);
    CHECK(summary_json(a.summary) == summary_json(b.summary));
    for (const TrialResult& t : a.trials) CHECK(t.seed == substream(9, "trial", static_cast<std::uint64_t>(t.trial)));

    o.seed = 10;
    CHECK(run_var_experiment(cfg, o).trials != a.trials);

    o.methods.clear();
    CHECK_THROWS_AS(run_var_experiment(cfg, o), ConfigError);
    o.methods = {"bogus"};
    CHECK_THROWS_AS(run_var_experiment(cfg, o), ConfigError);
}

TEST_CASE("realization trial records and error metric") {
    const RealizationConfig cfg = small_realization();
    const MonteCarloOptions o = tiny_realization_options();
    const MonteCarloResult r = run_realization_experiment(cfg, o);
    REQUIRE(r.trials.size() == 8);
    for (const TrialResult& t : r.trials) {
        CHECK(t.error >= 0.0);
        CHECK(t.seconds == 0.0);
        if (!t.ok) continue;
        if (t.method == "lar" || t.method == "lar-ls") {
            CHECK(t.rank <= 6);
            for (double c : t.coefficients) CHECK(c >= 0.0);
        }
    }

    // Error equals the squared Frobenius distance of the reported estimate.
    RealizationConfig c1 = cfg;
    c1.seed = substream(o.seed, "trial", 0);
    const RealizationData d = gen_realization(c1);
    const TrialResult ls = run_realization_method("lar-ls", d, 6, o);
    REQUIRE(ls.ok);
    const Matrix est = synthesize(ls.atoms, ls.coefficients, HankelSpec::make(cfg.rows, cfg.cols)).matrix;
    CHECK(ls.error == doctest::Approx(frob_inner(est - d.X0, est - d.X0)).epsilon(1e-10));
    const auto same = std::find_if(r.trials.begin(), r.trials.end(),
                                   [](const TrialResult& t) { return t.trial == 0 && t.method == "lar-ls"; });
    REQUIRE(same != r.trials.end());
    TrialResult direct = ls;
    direct.trial = 0;
    direct.seed = c1.seed;
    CHECK(direct == *same);
}

TEST_CASE("failed trials are recorded and excluded from medians") {
    std::vector<TrialResult> rows;
    for (int t = 0; t < 4; ++t) {
        TrialResult a;
        a.method = "a";
        a.trial = t;
        a.error = 1.0 + t;
        rows.push_back(a);
        TrialResult b;
        b.method = "b";
        b.trial = t;
        b.error = t == 3 ? 0.0 : 10.0 * (t + 1);
        b.ok = t != 3;
        b.note = t == 3 ? "no rank-2 solution on the lambda grid" : "";
        rows.push_back(b);
    }
    const Summary s = summarize(rows, "x", 1);
    REQUIRE(s.methods.size() == 2);
    CHECK(s.trials == 4);
    CHECK(s.methods[0].median == 2.5);
    CHECK(s.methods[1].failed == 1);
    CHECK(s.methods[1].median == 20.0);
    REQUIRE(s.reductions.size() == 2);
    CHECK(s.reductions[0].method == "a");
    CHECK(s.reductions[0].value == doctest::Approx(1.0 - 2.5 / 20.0));
    CHECK_THROWS_AS(summarize({}, "x", 1), ArgumentError);
}

TEST_CASE("trial CSV round trip and summary recomputation") {
    const MonteCarloResult r = run_realization_experiment(small_realization(), tiny_realization_options());
    std::vector<TrialResult> rows = r.trials;
    rows[0].note = "comma, \"quoted\"\nand a newline";
    rows[0].seconds = 0.1234567890123;
    std::stringstream ss;
    write_trials_csv(ss, rows);
    const std::vector<TrialResult> back = read_trials_csv(ss);
    CHECK(back == rows);

    const Summary again = summarize(back, r.summary.experiment, r.summary.seed, gen_realization(small_realization()).atoms);
    REQUIRE(again.methods.size() == r.summary.methods.size());
    for (std::size_t i = 0; i < again.methods.size(); ++i) {
        std::vector<double> errs;
        for (const TrialResult& t : back) {
            if (t.method == again.methods[i].method && t.ok) errs.push_back(t.error);
        }
        if (errs.empty()) continue;
        std::sort(errs.begin(), errs.end());
        const double med = errs.size() % 2 ? errs[errs.size() / 2]
                                           : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
        CHECK(again.methods[i].median == doctest::Approx(med).epsilon(1e-15));
        CHECK(r.summary.methods[i].median == doctest::Approx(med).epsilon(1e-15));
    }

    std::stringstream bad("method,trial\nlar,notanumber\n");
    CHECK_THROWS_AS(read_trials_csv(bad), IoError);
}

TEST_CASE("summary document and report files") {
    const MonteCarloResult r = run_realization_experiment(small_realization(), tiny_realization_options());
    const auto doc = nlohmann::json::parse(summary_json(r.summary));
    CHECK(doc["experiment"] == "realization");
    CHECK(doc["methods"].size() == 4);
    CHECK(summary_table(r.summary).find("lar-ls") != std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "lowrank_report_test";
    std::filesystem::remove_all(dir);
    write_report(dir.string(), r);
    CHECK(std::filesystem::exists(dir / "trials.csv"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    CHECK(std::filesystem::exists(dir / "summary.txt"));
    std::ifstream in(dir / "trials.csv");
    CHECK(read_trials_csv(in) == r.trials);
    std::filesystem::remove_all(dir);
}

TEST_CASE("delimited text matrices and sequences") {
    std::stringstream in("# header\n1, 2 3\n\n4,5,6 # trailing\n");
    const Matrix M = read_matrix(in);
    REQUIRE(M.rows() == 2);
    REQUIRE(M.cols() == 3);
    CHECK(M(1, 2) == 6.0);

    std::stringstream ragged("1 2\n3\n");
    CHECK_THROWS_AS(read_matrix(ragged), IoError);
    std::stringstream junk("1 x\n");
    CHECK_THROWS_AS(read_matrix(junk), IoError);
    std::stringstream empty("# nothing\n");
    CHECK_THROWS_AS(read_matrix(empty), IoError);
    CHECK_THROWS_AS(read_matrix_file("/nonexistent/file.txt"), IoError);

    std::stringstream seq("1\n+2.5\n-3e-2 4\n");
    const Sequence s = read_sequence(seq);
    REQUIRE(s.size() == 4);
    CHECK(s(1) == 2.5);
    CHECK(s(2) == -0.03);

    Matrix R(2, 2);
    R << 0.1, 1.0 / 3.0, -2e-300, 12345.678901234567;
    std::stringstream out;
    write_matrix(out, R);
    CHECK(read_matrix(out) == R);
    std::stringstream so;
    write_sequence(so, s);
    CHECK(read_sequence(so) == s);
}
