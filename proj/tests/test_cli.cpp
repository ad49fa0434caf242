#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "cirdil/cirdil.hpp"

using namespace cirdil;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("cirdil_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the CLI with the given argument string inside the test directory.
    RunResult run(const std::string& args, const std::string& env = "") const {
        const fs::path err_file = dir_ / "stderr.txt";
        const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + CIRDIL_CLI_PATH + "' " + args +
                                " 2> '" + err_file.string() + "'";
        RunResult r;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return r;
        char buf[4096];
        std::size_t n;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
        const int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = read_file(err_file);
        return r;
    }

    std::string file(const std::string& rel) const { return read_file(dir_ / rel); }

    fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, ReferenceSweepPrintsFiveRowsAndFlags) {
    const auto r = run("sweep --seed 42 --docs 50 --dim 256 --out-dir out");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines(r.out), 7u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), kCsvHeader);
    for (const char* s : {"\nbaseline,", "\nlow,", "\nmedium,", "\nhigh,", "\noverload,", "\n# flags inverted_u="})
        EXPECT_NE(r.out.find(s), std::string::npos) << s;
    EXPECT_EQ(file("out/report.csv"), r.out);
    const auto rep = report_from_jsonl(file("out/report.jsonl"));
    EXPECT_EQ(report_to_csv(rep), r.out);
    EXPECT_TRUE(fs::exists(dir_ / "out/report.csv.config"));
}

TEST_F(Cli, StagesComposeToTheSweepPipeline) {
    ASSERT_EQ(run("gen --seed 7 --docs 10 --out-dir p").code, 0);
    ASSERT_EQ(run("chunk --corpus p/corpus.jsonl --out-dir p").code, 0);

    RunConfig cfg;
    cfg.seed = 7;
    cfg.corpus.doc_counts = scaled_doc_counts(10);
    const Corpus corpus = generate_corpus(cfg.resolved_corpus());
    EXPECT_EQ(file("p/corpus.jsonl"), corpus_to_jsonl(corpus));
    const auto chunks = chunk_corpus(corpus.documents, 250);
    EXPECT_EQ(file("p/chunks.jsonl"), chunks_to_jsonl(chunks));

    for (const char* name : {"baseline", "low", "medium", "high", "overload", "ddai"}) {
        const std::string s(name);
        ASSERT_EQ(run("inject --corpus p/corpus.jsonl --chunks p/chunks.jsonl --strategy " + s + " --out p/" + s +
                      ".jsonl")
                      .code,
                  0);
        ASSERT_EQ(run("embed --seed 7 --enriched p/" + s + ".jsonl --out p/" + s + ".vec").code, 0);
        ASSERT_EQ(run("index --vectors p/" + s + ".vec --out p/" + s + ".cirx").code, 0);

        const auto strategy = InjectionStrategy::preset(*parse_strategy(s), 250, 0.35);
        const auto expected = detail::index_enriched(enrich_all(corpus.documents, chunks, strategy),
                                                     cfg.resolved_embedder());
        EXPECT_EQ(file("p/" + s + ".cirx"), index_to_bytes(expected)) << s;
    }

    const auto q = run("query --seed 7 --index p/medium.cirx --text \"" + join_tokens(corpus.queries[0].text) +
                       "\" --k 10");
    ASSERT_EQ(q.code, 0) << q.err;
    EXPECT_EQ(count_lines(q.out), 10u);
    EXPECT_EQ(q.out.substr(0, 2), "1\t");
}

TEST_F(Cli, CommandsAreIdempotent) {
    ASSERT_EQ(run("gen --docs 6 --out a.jsonl").code, 0);
    const std::string first = file("a.jsonl");
    ASSERT_EQ(run("gen --docs 6 --out a.jsonl").code, 0);
    EXPECT_EQ(file("a.jsonl"), first);
    EXPECT_FALSE(fs::exists(dir_ / "a.jsonl.tmp"));
}

TEST_F(Cli, ReportPlotdataWritesOneSeriesPerStrategy) {
    ASSERT_EQ(run("sweep --docs 10 --out-dir s").code, 0);
    const auto r = run("report --input s/report.jsonl --format plotdata --out-dir s");
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "s/plotdata")) n += e.path().extension() == ".dat";
    EXPECT_EQ(n, 5u);
    ASSERT_EQ(run("report --input s/report.jsonl --format csv --out-dir c").code, 0);
    EXPECT_EQ(file("c/report.csv"), file("s/report.csv"));
}

TEST_F(Cli, EnvironmentSetsDefaultOutputDirectory) {
    const auto r = run("gen --docs 3", "CIRDIL_OUT_DIR=envdir");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "envdir/corpus.jsonl"));
    ASSERT_EQ(run("gen --docs 3 --out-dir flagdir", "CIRDIL_OUT_DIR=envdir").code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "flagdir/corpus.jsonl"));
}

TEST_F(Cli, ConfigFileAppliesAndFlagsOverride) {
    write_file_atomic(dir_ / "run.cfg", "docs = 4\nseed = 5\n");
    ASSERT_EQ(run("gen --config run.cfg --seed 6 --out x.jsonl").code, 0);
    const Corpus c = corpus_from_jsonl(file("x.jsonl"));
    EXPECT_EQ(c.documents.size(), 4u);

    RunConfig echoed;
    apply_kv(echoed, parse_kv(file("x.jsonl.config")));
    EXPECT_EQ(echoed.seed, 6u);
    EXPECT_EQ(echoed.corpus.total_docs(), 4);
    EXPECT_EQ(corpus_to_jsonl(generate_corpus(echoed.resolved_corpus())), file("x.jsonl"));
}

TEST_F(Cli, HelpDocumentsFormats) {
    const auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    for (const char* s : {"CIRX", "corpus.jsonl", "report.csv", "plotdata", "CIRDIL_OUT_DIR", "Exit codes"})
        EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST_F(Cli, DistinctExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("gen --no-such-flag").code, 2);
    EXPECT_EQ(run("inject --corpus c.jsonl --chunks k.jsonl --strategy extreme").code, 2);
    EXPECT_EQ(run("chunk --corpus missing.jsonl").code, 3);
    EXPECT_EQ(run("gen --config missing.cfg").code, 3);

    write_file_atomic(dir_ / "garbage.jsonl", "this is not json\n");
    write_file_atomic(dir_ / "garbage.cirx", "CIRX\x01");
    const auto bad = run("chunk --corpus garbage.jsonl");
    EXPECT_EQ(bad.code, 4);
    EXPECT_EQ(count_lines(bad.err), 1u);
    EXPECT_NE(bad.err.find("line 1"), std::string::npos);
    EXPECT_EQ(run("query --index garbage.cirx --text x").code, 4);

    EXPECT_EQ(run("sweep --t-max 1.5").code, 5);
    EXPECT_EQ(run("gen --docs 0").code, 5);
    write_file_atomic(dir_ / "bad.cfg", "colour = red\n");
    const auto cfg = run("gen --config bad.cfg");
    EXPECT_EQ(cfg.code, 5);
    EXPECT_NE(cfg.err.find("colour"), std::string::npos);
}
