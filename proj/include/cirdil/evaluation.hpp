#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cirdil/chunking.hpp"
#include "cirdil/corpus.hpp"
#include "cirdil/corpus_io.hpp"
#include "cirdil/embedding.hpp"
#include "cirdil/injection.hpp"
#include "cirdil/io.hpp"
#include "cirdil/retrieval.hpp"

namespace cirdil {

/// NDCG@k with binary gains: DCG = sum_{i<=k} rel_i / log2(i + 1), normalized by
/// the DCG of min(k, |relevant|) hits at the top. 0 when relevant is empty.
inline double ndcg_at_k(const SearchResult& ranking, const std::set<std::string>& relevant, std::size_t k = 10) {
    if (k == 0) throw DomainError("ndcg_at_k: k must be >= 1");
    if (relevant.empty()) return 0.0;
    double dcg = 0.0;
    const std::size_t depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.count(ranking[i].chunk_id)) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    double idcg = 0.0;
    const std::size_t ideal = std::min(k, relevant.size());
    for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

// Collapses runs of consecutive hits from the same document to their first hit.
inline std::vector<Hit> collapse_document_runs(const SearchResult& ranking) {
    std::vector<Hit> out;
    for (const Hit& h : ranking.hits) {
        if (out.empty() || out.back().doc_id != h.doc_id) out.push_back(h);
    }
    return out;
}

/// Specific: 1 if the gold chunk is in the top k. Thematic: 1 if any chunk of the
/// gold document is in the top k after collapsing consecutive same-document hits.
inline double recall_at_k(const SearchResult& ranking, const QuerySpec& query, std::size_t k = 5) {
    if (k == 0) throw DomainError("recall_at_k: k must be >= 1");
    if (query.intent == Intent::Specific) {
        if (query.gold_chunk_ids.empty()) return 0.0;
        const std::string& gold = query.gold_chunk_ids.front();
        const std::size_t depth = std::min(k, ranking.size());
        for (std::size_t i = 0; i < depth; ++i) {
            if (ranking[i].chunk_id == gold) return 1.0;
        }
        return 0.0;
    }
    const auto runs = collapse_document_runs(ranking);
    const std::size_t depth = std::min(k, runs.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (runs[i].doc_id == query.gold_doc_id) return 1.0;
    }
    return 0.0;
}

/// Mean pairwise cosine among one document's chunk vectors; nullopt for fewer than 2.
inline std::optional<double> homogenization(const std::vector<EmbeddingVector>& doc_chunk_vectors) {
    const std::size_t n = doc_chunk_vectors.size();
    if (n < 2) return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) sum += similarity(doc_chunk_vectors[i], doc_chunk_vectors[j]);
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

// Average of per-document homogenization over documents with at least two chunks.
inline std::optional<double> corpus_homogenization(const std::map<std::string, std::vector<EmbeddingVector>>& by_doc) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [doc, vecs] : by_doc) {
        if (const auto h = homogenization(vecs)) {
            sum += *h;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

struct RetrievalFailure {
    QuerySpec query;  // a specific query
    Hit top1;         // its top-ranked hit, which is not the gold chunk
};

/// Share of failures whose top-1 hit is in the gold document but in another section.
inline std::optional<double> wrong_section_share(const std::vector<RetrievalFailure>& failures) {
    if (failures.empty()) return std::nullopt;
    std::size_t same_doc_wrong_section = 0;
    for (const auto& f : failures) {
        if (f.query.gold_chunk_ids.empty()) continue;
        const auto gold = parse_chunk_id(f.query.gold_chunk_ids.front());
        if (!gold) throw DomainError("malformed gold chunk id '" + f.query.gold_chunk_ids.front() + "'");
        if (f.top1.doc_id == f.query.gold_doc_id && f.top1.section_index != gold->section_index)
            ++same_doc_wrong_section;
    }
    return static_cast<double>(same_doc_wrong_section) / static_cast<double>(failures.size());
}

struct MetricRow {
    StrategyKind strategy = StrategyKind::Baseline;
    double mean_cir = 0.0;
    double ndcg_at_10 = 0.0;
    double recall5_specific = 0.0;
    double recall5_thematic = 0.0;
    double homogenization = 0.0;
    std::optional<double> wrong_section_share;

    bool operator==(const MetricRow&) const = default;
};

struct SweepFlags {
    bool inverted_u = false;
    std::optional<double> curve_cross_cir;

    bool operator==(const SweepFlags&) const = default;
};

struct SweepReport {
    std::string config_digest;
    std::vector<MetricRow> rows;  // ascending mean_cir
    SweepFlags flags;

    const MetricRow* row(StrategyKind k) const {
        for (const auto& r : rows) {
            if (r.strategy == k) return &r;
        }
        return nullptr;
    }

    bool operator==(const SweepReport&) const = default;
};

/// inverted_u: some interior row has NDCG above both extreme-CIR rows.
/// curve_cross_cir: when specific recall leads at the lowest CIR, the smallest
/// mean CIR whose thematic recall exceeds specific recall.
inline SweepFlags compute_flags(const std::vector<MetricRow>& rows) {
    SweepFlags flags;
    if (rows.size() >= 3) {
        const double lo = rows.front().ndcg_at_10;
        const double hi = rows.back().ndcg_at_10;
        for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
            if (rows[i].ndcg_at_10 > lo && rows[i].ndcg_at_10 > hi) flags.inverted_u = true;
        }
    }
    if (!rows.empty() && rows.front().recall5_specific > rows.front().recall5_thematic) {
        for (const auto& r : rows) {
            if (r.recall5_thematic > r.recall5_specific) {
                flags.curve_cross_cir = r.mean_cir;
                break;
            }
        }
    }
    return flags;
}

struct SweepOptions {
    std::size_t chunk_target = 250;
    std::size_t ndcg_k = 10;
    std::size_t recall_k = 5;
    double t_max = 0.35;
    std::size_t threads = 1;
};

namespace detail {

struct StrategyRun {
    MetricRow row;
    VectorIndex index;
};

inline VectorIndex index_enriched(const std::vector<EnrichedChunk>& enriched, const EmbedderConfig& config) {
    std::vector<IndexEntry> entries;
    entries.reserve(enriched.size());
    for (const auto& e : enriched) {
        entries.push_back({e.base.chunk_id, e.base.doc_id, e.base.section_index, embed(e.tokens, config)});
    }
    return build_index(entries, config.dim);
}

inline MetricRow evaluate_strategy(const std::vector<Document>& docs, const std::vector<Chunk>& chunks,
                                   const std::vector<QuerySpec>& queries,
                                   const std::vector<EmbeddingVector>& query_vectors,
                                   const InjectionStrategy& strategy, const EmbedderConfig& config,
                                   const SweepOptions& options) {
    const auto enriched = enrich_all(docs, chunks, strategy);
    const VectorIndex index = index_enriched(enriched, config);

    MetricRow row;
    row.strategy = strategy.kind;
    row.mean_cir = mean_cir(enriched);

    std::map<std::string, std::vector<EmbeddingVector>> by_doc;
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto v = index.vector_at(i);
        std::vector<double> comps(v.begin(), v.end());
        by_doc[index.meta()[i].doc_id].push_back(EmbeddingVector::normalized(std::move(comps)));
    }
    row.homogenization = corpus_homogenization(by_doc).value_or(0.0);

    const std::size_t depth = std::max(options.ndcg_k, options.recall_k);
    double ndcg_sum = 0.0;
    double spec_sum = 0.0;
    double them_sum = 0.0;
    std::size_t n_spec = 0;
    std::size_t n_them = 0;
    std::vector<RetrievalFailure> failures;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const QuerySpec& q = queries[qi];
        const SearchResult res = search(index, query_vectors[qi], depth);
        const std::set<std::string> relevant(q.gold_chunk_ids.begin(), q.gold_chunk_ids.end());
        ndcg_sum += ndcg_at_k(res, relevant, options.ndcg_k);
        const double r = recall_at_k(res, q, options.recall_k);
        if (q.intent == Intent::Specific) {
            spec_sum += r;
            ++n_spec;
            if (res.size() > 0 && !q.gold_chunk_ids.empty() && res[0].chunk_id != q.gold_chunk_ids.front())
                failures.push_back({q, res[0]});
        } else {
            them_sum += r;
            ++n_them;
        }
    }
    row.ndcg_at_10 = queries.empty() ? 0.0 : ndcg_sum / static_cast<double>(queries.size());
    row.recall5_specific = n_spec ? spec_sum / static_cast<double>(n_spec) : 0.0;
    row.recall5_thematic = n_them ? them_sum / static_cast<double>(n_them) : 0.0;
    row.wrong_section_share = wrong_section_share(failures);
    return row;
}

}  // namespace detail

inline std::string sweep_digest(const Corpus& corpus, const std::vector<InjectionStrategy>& strategies,
                                const EmbedderConfig& config, const SweepOptions& options) {
    std::string canon = corpus_to_jsonl(corpus);
    canon += "dim=" + std::to_string(config.dim) + ";hash_seed=" + std::to_string(config.hash_seed);
    canon += ";target=" + std::to_string(options.chunk_target) + ";ndcg_k=" + std::to_string(options.ndcg_k) +
             ";recall_k=" + std::to_string(options.recall_k);
    for (const auto& s : strategies) {
        canon += ";" + std::string(to_string(s.kind)) + ":" + std::to_string(s.hierarchy_budget) + ":" +
                 std::to_string(s.context_budget) + ":" + std::to_string(s.t_max);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

/// For each strategy: chunk, build contexts, enrich, embed, index and evaluate
/// every query. Strategies are independent and may run on separate threads; the
/// report does not depend on the thread count.
inline SweepReport run_sweep(const Corpus& corpus, const std::vector<InjectionStrategy>& strategies,
                             const EmbedderConfig& config, const SweepOptions& options = {}) {
    validate(config);
    if (corpus.documents.empty()) throw DomainError("run_sweep: empty corpus");
    if (corpus.queries.empty()) throw DomainError("run_sweep: no queries");
    const auto chunks = chunk_corpus(corpus.documents, options.chunk_target);

    std::vector<EmbeddingVector> query_vectors;
    query_vectors.reserve(corpus.queries.size());
    for (const auto& q : corpus.queries) query_vectors.push_back(embed(q.text, config));

    std::vector<MetricRow> rows(strategies.size());
    auto work = [&](std::size_t i) {
        rows[i] = detail::evaluate_strategy(corpus.documents, chunks, corpus.queries, query_vectors, strategies[i],
                                            config, options);
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, strategies.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < strategies.size(); ++i) work(i);
    } else {
        std::vector<std::exception_ptr> errors(strategies.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < strategies.size(); i += threads) {
                    try {
                        work(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const MetricRow& a, const MetricRow& b) { return a.mean_cir < b.mean_cir; });
    SweepReport report;
    report.config_digest = sweep_digest(corpus, strategies, config, options);
    report.rows = std::move(rows);
    report.flags = compute_flags(report.rows);
    return report;
}

// ---------------------------------------------------------------------------
// Report rendering

enum class ReportFormat { Csv, Jsonl, Plotdata };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "jsonl") return ReportFormat::Jsonl;
    if (s == "plotdata") return ReportFormat::Plotdata;
    return std::nullopt;
}

inline constexpr std::string_view kCsvHeader =
    "strategy,mean_cir,ndcg10,recall5_specific,recall5_thematic,homogenization,wrong_section_share";

inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Header, one line per row, then a '#' flags line (omitted for an empty report).
/// An absent wrong_section_share is an empty field.
inline std::string report_to_csv(const SweepReport& report) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : report.rows) {
        out += std::string(to_string(r.strategy)) + "," + fmt6(r.mean_cir) + "," + fmt6(r.ndcg_at_10) + "," +
               fmt6(r.recall5_specific) + "," + fmt6(r.recall5_thematic) + "," + fmt6(r.homogenization) + "," +
               (r.wrong_section_share ? fmt6(*r.wrong_section_share) : std::string()) + "\n";
    }
    if (!report.rows.empty()) {
        out += "# flags inverted_u=" + std::string(report.flags.inverted_u ? "true" : "false") +
               " curve_cross_cir=" +
               (report.flags.curve_cross_cir ? fmt6(*report.flags.curve_cross_cir) : std::string("none")) +
               " config_digest=" + report.config_digest + "\n";
    }
    return out;
}

inline std::string report_to_jsonl(const SweepReport& report) {
    using nlohmann::json;
    std::string out;
    for (const auto& r : report.rows) {
        json j = {{"record", "row"},
                  {"strategy", std::string(to_string(r.strategy))},
                  {"mean_cir", r.mean_cir},
                  {"ndcg10", r.ndcg_at_10},
                  {"recall5_specific", r.recall5_specific},
                  {"recall5_thematic", r.recall5_thematic},
                  {"homogenization", r.homogenization},
                  {"wrong_section_share", r.wrong_section_share ? json(*r.wrong_section_share) : json(nullptr)}};
        out += j.dump() + "\n";
    }
    json flags = {{"record", "flags"},
                  {"config_digest", report.config_digest},
                  {"inverted_u", report.flags.inverted_u},
                  {"curve_cross_cir",
                   report.flags.curve_cross_cir ? json(*report.flags.curve_cross_cir) : json(nullptr)}};
    out += flags.dump() + "\n";
    return out;
}

inline SweepReport report_from_jsonl(std::string_view text) {
    using nlohmann::json;
    SweepReport report;
    bool have_flags = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const auto record = j.at("record").get<std::string>();
            if (record == "row") {
                MetricRow r;
                const auto k = parse_strategy(j.at("strategy").get<std::string>());
                if (!k) throw ParseError(line_no, "unknown strategy");
                r.strategy = *k;
                j.at("mean_cir").get_to(r.mean_cir);
                j.at("ndcg10").get_to(r.ndcg_at_10);
                j.at("recall5_specific").get_to(r.recall5_specific);
                j.at("recall5_thematic").get_to(r.recall5_thematic);
                j.at("homogenization").get_to(r.homogenization);
                if (!j.at("wrong_section_share").is_null()) r.wrong_section_share = j.at("wrong_section_share").get<double>();
                report.rows.push_back(r);
            } else if (record == "flags") {
                j.at("config_digest").get_to(report.config_digest);
                j.at("inverted_u").get_to(report.flags.inverted_u);
                if (!j.at("curve_cross_cir").is_null()) report.flags.curve_cross_cir = j.at("curve_cross_cir").get<double>();
                have_flags = true;
            } else {
                throw ParseError(line_no, "unknown record type '" + record + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, std::string("malformed report record: ") + e.what());
        }
    }
    if (!have_flags) throw ParseError(line_no + 1, "report is missing its flags record");
    return report;
}

// One two-column series per strategy: file name -> contents.
inline std::map<std::string, std::string> report_to_plotdata(const SweepReport& report) {
    std::map<std::string, std::string> files;
    for (const auto& r : report.rows) {
        std::string body = "# strategy " + std::string(to_string(r.strategy)) + "\n# mean_cir ndcg10\n";
        body += fmt6(r.mean_cir) + " " + fmt6(r.ndcg_at_10) + "\n";
        files[std::string(to_string(r.strategy)) + ".dat"] = std::move(body);
    }
    return files;
}

/// Writes the report into out_dir; returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const SweepReport& report, ReportFormat format,
                                                      const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    switch (format) {
        case ReportFormat::Csv:
            written.push_back(out_dir / "report.csv");
            write_file_atomic(written.back(), report_to_csv(report));
            break;
        case ReportFormat::Jsonl:
            written.push_back(out_dir / "report.jsonl");
            write_file_atomic(written.back(), report_to_jsonl(report));
            break;
        case ReportFormat::Plotdata:
            for (const auto& [name, body] : report_to_plotdata(report)) {
                written.push_back(out_dir / "plotdata" / name);
                write_file_atomic(written.back(), body);
            }
            break;
    }
    return written;
}

}  // namespace cirdil
