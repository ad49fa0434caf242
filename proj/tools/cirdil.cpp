#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cirdil/cirdil.hpp"

namespace fs = std::filesystem;
using namespace cirdil;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMissingInput = 3,
    kBadFormat = 4,
    kBadConfig = 5,
};

class MissingInput : public IoError {
public:
    using IoError::IoError;
};

const char* const kFormats = R"(Files:
  corpus.jsonl    JSON Lines. Line 1 is {"record":"header","format":"cirdil-corpus",
                  "version":1,"documents":N,"queries":M}, followed by N "document"
                  records and then M "query" records.
  chunks.jsonl    One chunk per line: chunk_id, doc_id, section_index, offset,
                  heading_path, tokens. chunk_id is "<doc_id>#<section:3>@<offset:5>".
  enriched.jsonl  One enriched chunk per line: chunk_id, strategy, cir,
                  context_length, tokens (context tokens first, then chunk tokens).
  *.cirx          Binary vector index, little-endian: "CIRX", u16 version (1),
                  u32 dim, u64 count, then per entry u32-length-prefixed chunk_id
                  and doc_id plus u32 section index, then count*dim float32
                  unit vectors.
  report.csv      strategy,mean_cir,ndcg10,recall5_specific,recall5_thematic,
                  homogenization,wrong_section_share; then one line
                  "# flags inverted_u=<bool> curve_cross_cir=<x|none> config_digest=<hex>".
  report.jsonl    One {"record":"row",...} per strategy, then a {"record":"flags",...}.
  plotdata/*.dat  Per strategy: two comment lines, then "<mean_cir> <ndcg10>".
  --config FILE   "key = value" lines, '#' comments. Keys: seed, docs,
                  docs.normative, docs.technical, docs.transactional,
                  sections_per_doc (lo,hi), facts_per_section (lo,hi),
                  chunk_target, vocab_topic_size, vocab_shared_size,
                  docs_per_topic, queries, specific_fraction, dim, hash_seed,
                  strategies (comma list), t_max, ndcg_k, recall_k, threads, out_dir.
  *.config        Every output file gets a sidecar with the resolved settings.
Precedence: built-in defaults < CIRDIL_OUT_DIR < --config file < flags.
Exit codes: 0 ok, 1 other failure, 2 invalid usage, 3 missing input,
  4 malformed input file, 5 invalid configuration or value out of domain.
)";

struct Flags {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> docs;
    std::optional<int> target;
    std::optional<std::size_t> dim;
    std::optional<std::uint64_t> hash_seed;
    std::optional<double> t_max;
    std::optional<std::string> strategies;
    std::optional<std::size_t> threads;
    std::optional<std::string> out_dir;
};

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (const char* env = std::getenv("CIRDIL_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (!f.config_file.empty()) {
        if (!fs::exists(f.config_file)) throw MissingInput("config file not found: " + f.config_file);
        apply_kv(cfg, parse_kv(read_file(f.config_file)));
    }
    if (f.seed) cfg.seed = *f.seed;
    if (f.docs) cfg.corpus.doc_counts = scaled_doc_counts(*f.docs);
    if (f.target) cfg.corpus.chunk_token_target = *f.target;
    if (f.dim) cfg.embedder.dim = *f.dim;
    if (f.hash_seed) cfg.hash_seed = *f.hash_seed;
    if (f.t_max) cfg.t_max = *f.t_max;
    if (f.strategies) cfg.strategies = parse_strategy_list("strategies", *f.strategies);
    if (f.threads) cfg.threads = *f.threads;
    if (f.out_dir) cfg.out_dir = *f.out_dir;
    validate(cfg);
    return cfg;
}

std::string read_input(const std::string& path) {
    if (path.empty()) throw ConfigError("input", "no input file given");
    if (!fs::exists(path)) throw MissingInput("input not found: " + path);
    return read_file(path);
}

fs::path output_path(const RunConfig& cfg, const std::string& explicit_out, const char* default_name) {
    if (!explicit_out.empty()) return explicit_out;
    return fs::path(cfg.out_dir) / default_name;
}

void write_with_provenance(const RunConfig& cfg, const fs::path& path, std::string_view bytes) {
    write_file_atomic(path, bytes);
    fs::path sidecar = path;
    sidecar += ".config";
    write_file_atomic(sidecar, to_kv_text(cfg));
    std::cerr << "wrote " << path.string() << "\n";
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "Key-value settings file");
    cmd->add_option("--seed", f.seed, "Top-level seed (default 42)");
    cmd->add_option("--out-dir", f.out_dir, "Output directory (default $CIRDIL_OUT_DIR or .)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-injection dilution experiments: corpus generation, chunking, context injection, "
                 "embedding, exact retrieval and evaluation sweeps."};
    app.footer(kFormats);
    app.require_subcommand(1);

    Flags f;
    std::string in_corpus, in_chunks, in_enriched, in_vectors, in_index, in_report, out_file;
    std::string strategy_name = "baseline";
    std::string query_text;
    std::size_t k = 10;
    std::string format = "csv";

    auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus with its query set");
    add_common(gen, f);
    gen->add_option("--docs", f.docs, "Total documents, split 3:4:3 over normative/technical/transactional");
    gen->add_option("--out", out_file, "Output file (default <out-dir>/corpus.jsonl)");

    auto* chunk = app.add_subcommand("chunk", "Split a corpus into fixed-size, section-bounded chunks");
    add_common(chunk, f);
    chunk->add_option("--corpus", in_corpus, "Corpus JSONL")->required();
    chunk->add_option("--target", f.target, "Chunk length in tokens (default 250)");
    chunk->add_option("--out", out_file, "Output file (default <out-dir>/chunks.jsonl)");

    auto* inject = app.add_subcommand("inject", "Prepend injected context to every chunk");
    add_common(inject, f);
    inject->add_option("--corpus", in_corpus, "Corpus JSONL")->required();
    inject->add_option("--chunks", in_chunks, "Chunks JSONL")->required();
    inject->add_option("--strategy", strategy_name, "baseline|low|medium|high|overload|ddai")
        ->check(CLI::IsMember({"baseline", "low", "medium", "high", "overload", "ddai"}));
    inject->add_option("--t-max", f.t_max, "CIR ceiling for ddai (default 0.35)");
    inject->add_option("--target", f.target, "Reference chunk length for static budgets (default 250)");
    inject->add_option("--out", out_file, "Output file (default <out-dir>/enriched.jsonl)");

    auto* embed_cmd = app.add_subcommand("embed", "Embed enriched chunks into a vector file");
    add_common(embed_cmd, f);
    embed_cmd->add_option("--enriched", in_enriched, "Enriched JSONL")->required();
    embed_cmd->add_option("--dim", f.dim, "Embedding dimension (default 256)");
    embed_cmd->add_option("--hash-seed", f.hash_seed, "Feature-hash seed (default derived from --seed)");
    embed_cmd->add_option("--out", out_file, "Output file (default <out-dir>/vectors.cirx)");

    auto* index_cmd = app.add_subcommand("index", "Validate a vector file and write it as a search index");
    add_common(index_cmd, f);
    index_cmd->add_option("--vectors", in_vectors, "Vector file (.cirx)")->required();
    index_cmd->add_option("--out", out_file, "Output file (default <out-dir>/index.cirx)");

    auto* query_cmd = app.add_subcommand("query", "Exact top-k search; prints rank, chunk, doc, section, score");
    add_common(query_cmd, f);
    query_cmd->add_option("--index", in_index, "Index file (.cirx)")->required();
    query_cmd->add_option("--text", query_text, "Query text")->required();
    query_cmd->add_option("-k,--k", k, "Number of hits (default 10)");
    query_cmd->add_option("--dim", f.dim, "Must match the index dimension when given");
    query_cmd->add_option("--hash-seed", f.hash_seed, "Feature-hash seed used to build the index");

    auto* sweep = app.add_subcommand("sweep", "Generate, chunk, inject, embed, index and evaluate every strategy");
    add_common(sweep, f);
    sweep->add_option("--docs", f.docs, "Total documents (default 50)");
    sweep->add_option("--dim", f.dim, "Embedding dimension (default 256)");
    sweep->add_option("--hash-seed", f.hash_seed, "Feature-hash seed (default derived from --seed)");
    sweep->add_option("--t-max", f.t_max, "CIR ceiling for ddai (default 0.35)");
    sweep->add_option("--target", f.target, "Chunk length in tokens (default 250)");
    sweep->add_option("--strategies", f.strategies, "Comma list (default baseline,low,medium,high,overload)");
    sweep->add_option("--threads", f.threads, "Worker threads; output does not depend on it (default 1)");

    auto* report = app.add_subcommand("report", "Re-render a report.jsonl as csv, jsonl or plotdata");
    add_common(report, f);
    report->add_option("--input", in_report, "report.jsonl")->required();
    report->add_option("--format", format, "csv|jsonl|plotdata")
        ->check(CLI::IsMember({"csv", "jsonl", "plotdata"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        const RunConfig cfg = resolve(f);

        if (gen->parsed()) {
            const Corpus corpus = generate_corpus(cfg.resolved_corpus());
            write_with_provenance(cfg, output_path(cfg, out_file, "corpus.jsonl"), corpus_to_jsonl(corpus));
        } else if (chunk->parsed()) {
            const Corpus corpus = corpus_from_jsonl(read_input(in_corpus));
            const auto chunks = chunk_corpus(corpus.documents, static_cast<std::size_t>(cfg.corpus.chunk_token_target));
            write_with_provenance(cfg, output_path(cfg, out_file, "chunks.jsonl"), chunks_to_jsonl(chunks));
        } else if (inject->parsed()) {
            const Corpus corpus = corpus_from_jsonl(read_input(in_corpus));
            const auto chunks = chunks_from_jsonl(read_input(in_chunks));
            const StrategyKind kind = *parse_strategy(strategy_name);
            const auto strategy =
                InjectionStrategy::preset(kind, static_cast<std::size_t>(cfg.corpus.chunk_token_target), cfg.t_max);
            const auto enriched = enrich_all(corpus.documents, chunks, strategy);
            write_with_provenance(cfg, output_path(cfg, out_file, "enriched.jsonl"),
                                  enriched_to_jsonl(enriched, kind));
        } else if (embed_cmd->parsed()) {
            const auto records = enriched_from_jsonl(read_input(in_enriched));
            const EmbedderConfig ecfg = cfg.resolved_embedder();
            std::vector<IndexEntry> entries;
            entries.reserve(records.size());
            for (const auto& r : records)
                entries.push_back({r.chunk_id, r.doc_id, r.section_index, embed(r.tokens, ecfg)});
            write_with_provenance(cfg, output_path(cfg, out_file, "vectors.cirx"),
                                  index_to_bytes(build_index(entries, ecfg.dim)));
        } else if (index_cmd->parsed()) {
            const VectorIndex index = index_from_bytes(read_input(in_vectors));
            write_with_provenance(cfg, output_path(cfg, out_file, "index.cirx"), index_to_bytes(index));
        } else if (query_cmd->parsed()) {
            const VectorIndex index = index_from_bytes(read_input(in_index));
            EmbedderConfig ecfg = cfg.resolved_embedder();
            if (f.dim && *f.dim != index.dim())
                throw ConfigError("dim", "index has dimension " + std::to_string(index.dim()));
            ecfg.dim = index.dim();
            const TokenSeq tokens = tokenize(query_text);
            if (tokens.empty()) throw DomainError("query text contains no tokens");
            const SearchResult res = search(index, embed(tokens, ecfg), k);
            for (std::size_t i = 0; i < res.size(); ++i) {
                std::printf("%zu\t%s\t%s\t%zu\t%s\n", i + 1, res[i].chunk_id.c_str(), res[i].doc_id.c_str(),
                            res[i].section_index, fmt6(res[i].score).c_str());
            }
        } else if (sweep->parsed()) {
            const Corpus corpus = generate_corpus(cfg.resolved_corpus());
            SweepOptions opts;
            opts.chunk_target = static_cast<std::size_t>(cfg.corpus.chunk_token_target);
            opts.ndcg_k = cfg.ndcg_k;
            opts.recall_k = cfg.recall_k;
            opts.t_max = cfg.t_max;
            opts.threads = cfg.threads;
            const SweepReport rep = run_sweep(corpus, cfg.resolved_strategies(), cfg.resolved_embedder(), opts);
            const fs::path dir = cfg.out_dir;
            const std::string csv = report_to_csv(rep);
            write_with_provenance(cfg, dir / "report.csv", csv);
            write_with_provenance(cfg, dir / "report.jsonl", report_to_jsonl(rep));
            std::fputs(csv.c_str(), stdout);
        } else if (report->parsed()) {
            const SweepReport rep = report_from_jsonl(read_input(in_report));
            for (const auto& p : emit_report(rep, *parse_report_format(format), cfg.out_dir))
                std::cerr << "wrote " << p.string() << "\n";
        }
        return kOk;
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMissingInput;
    } catch (const ParseError& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return kBadFormat;
    } catch (const FormatError& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return kBadFormat;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
