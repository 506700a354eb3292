#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "genemask/pipeline.hpp"

namespace gm = genemask;

namespace {

gm::MappingMode mapping_from_name(const std::string& name) {
    if (name == "exact") return gm::MappingMode::exact;
    if (name == "paper-literal") return gm::MappingMode::paper_literal;
    throw gm::Error("unknown mapping '" + name + "'");
}

gm::HighRule high_rule_from_name(const std::string& name) {
    if (name == "ceil") return gm::HighRule::ceil_half;
    if (name == "floor") return gm::HighRule::floor_half;
    throw gm::Error("unknown high rule '" + name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"genome k-mer statistics and deterministic mask planning"};
    app.require_subcommand(1);
    const int worker_default = gm::default_workers();

    gm::CountJob count_job;
    count_job.workers = worker_default;
    auto* count = app.add_subcommand("count", "count k-mers over a FASTA file");
    count->add_option("--fasta", count_job.fasta, "input FASTA")->required();
    count->add_option("--out", count_job.out, "output counts file")->required();
    count->add_option("--kmax", count_job.kmax, "largest k to count")
        ->default_val(10)
        ->check(CLI::Range(1, 15));
    count->add_option("--workers", count_job.workers, "worker threads")
        ->default_val(worker_default);

    gm::GrankJob grank_job;
    grank_job.workers = worker_default;
    auto* grank = app.add_subcommand("grank", "rank all 4096 6-mers by npmi");
    grank->add_option("--counts", grank_job.counts, "counts file")->required();
    grank->add_option("--out", grank_job.out, "output ranking TSV")->required();
    grank->add_option("--c", grank_job.c, "rare-frequency discount threshold")
        ->default_val(101);
    grank->add_option("--workers", grank_job.workers, "worker threads")
        ->default_val(worker_default);

    gm::VocabJob vocab_job;
    vocab_job.workers = worker_default;
    auto* vocab = app.add_subcommand("vocab", "build the masking vocabulary");
    vocab->add_option("--counts", vocab_job.counts, "counts file")->required();
    vocab->add_option("--out", vocab_job.out, "output vocabulary TSV")->required();
    vocab->add_option("--c", vocab_job.c, "rare-frequency discount threshold")
        ->default_val(101);
    vocab->add_option("--min-freq", vocab_job.min_freq,
                      "minimum corpus frequency for eligibility")
        ->default_val(10000);
    vocab->add_option("--vocab-size", vocab_job.size, "entries to keep")
        ->default_val(40000);
    vocab->add_option("--workers", vocab_job.workers, "worker threads")
        ->default_val(worker_default);

    gm::SegmentJob segment_job;
    auto* segment =
        app.add_subcommand("segment", "cut a FASTA into pretraining segments");
    segment->add_option("--fasta", segment_job.fasta, "input FASTA")->required();
    segment->add_option("--out", segment_job.out, "output segments TSV")->required();
    segment->add_option("--seed", segment_job.seed, "random seed")->default_val(42);
    segment->add_option("--boundaries", segment_job.boundaries,
                        "gene boundary TSV; segments never cross a boundary");

    gm::MaskJob mask_job;
    mask_job.workers = worker_default;
    std::string strategy_name = "genemask";
    std::string mapping_name = "exact";
    std::string high_rule_name = "ceil";
    double mlm_prob = -1.0;
    auto* mask = app.add_subcommand("mask", "emit mask plans for segments");
    mask->add_option("--segments", mask_job.segments, "segments TSV")->required();
    mask->add_option("--grank", mask_job.grank,
                     "6-mer ranking TSV (genemask strategy)");
    mask->add_option("--vocab", mask_job.vocab,
                     "masking vocabulary TSV (pmivoc strategy)");
    mask->add_option("--out", mask_job.out, "output JSONL")->required();
    mask->add_option("--strategy", strategy_name, "genemask, random, or pmivoc")
        ->default_val("genemask")
        ->check(CLI::IsMember({"genemask", "random", "pmivoc"}));
    mask->add_option("--mlm-prob", mlm_prob,
                     "masking budget; defaults to 0.01765 for genemask, 0.025 "
                     "for random and pmivoc");
    mask->add_option("--mapping", mapping_name,
                     "nucleotide-to-token mapping: exact or paper-literal")
        ->default_val("exact")
        ->check(CLI::IsMember({"exact", "paper-literal"}));
    mask->add_option("--high-rule", high_rule_name,
                     "size of the high-score half when the budget is odd")
        ->default_val("ceil")
        ->check(CLI::IsMember({"ceil", "floor"}));
    mask->add_option("--seed", mask_job.config.seed, "random seed")->default_val(42);
    mask->add_option("--k", mask_job.config.k, "token window length")
        ->default_val(6)
        ->check(CLI::Range(1, 15));
    mask->add_option("--workers", mask_job.workers, "worker threads")
        ->default_val(worker_default);

    gm::OverlapJob overlap_job;
    auto* overlap = app.add_subcommand(
        "overlap", "exact distinct n-gram containment between datasets");
    overlap->add_option("--reference", overlap_job.reference,
                        "reference sequence file (FASTA or TSV)")
        ->required();
    overlap->add_option("--probe", overlap_job.probe,
                        "probe sequence file (FASTA or TSV)")
        ->required();
    overlap->add_option("--out", overlap_job.out_json, "output report JSON")
        ->required();
    overlap->add_option("--ratios", overlap_job.out_ratios,
                        "optional per-example ratio TSV");
    overlap->add_option("--n", overlap_job.n, "n-gram length")
        ->default_val(15)
        ->check(CLI::Range(1, 31));

    gm::MotifJob motif_job;
    auto* motif =
        app.add_subcommand("motif", "rank the 6-mers matching a degenerate motif");
    motif->add_option("--grank", motif_job.grank, "6-mer ranking TSV")->required();
    motif->add_option("--pattern", motif_job.pattern,
                      "motif in degenerate-base (IUPAC) notation")
        ->required();
    motif->add_option("--out", motif_job.out, "output TSV; stdout when omitted");
    motif->add_flag("--top5", motif_job.top5, "keep only the best five ranks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(count)) {
            gm::run_count(count_job);
            std::fprintf(stderr, "counted k-mers up to k=%d into %s\n",
                         count_job.kmax, count_job.out.c_str());
        } else if (app.got_subcommand(grank)) {
            gm::run_grank(grank_job);
            std::fprintf(stderr, "ranked 4096 6-mers into %s\n",
                         grank_job.out.c_str());
        } else if (app.got_subcommand(vocab)) {
            const bool truncated = gm::run_vocab(vocab_job);
            if (truncated)
                std::fprintf(stderr,
                             "warning: fewer than %zu k-mers met the frequency "
                             "floor; vocabulary is smaller than requested\n",
                             vocab_job.size);
            std::fprintf(stderr, "wrote vocabulary to %s\n", vocab_job.out.c_str());
        } else if (app.got_subcommand(segment)) {
            const auto n = gm::run_segment(segment_job);
            std::fprintf(stderr, "wrote %zu segments to %s\n", n,
                         segment_job.out.c_str());
        } else if (app.got_subcommand(mask)) {
            mask_job.config.strategy = gm::strategy_from_name(strategy_name);
            mask_job.config.mapping = mapping_from_name(mapping_name);
            mask_job.config.high_rule = high_rule_from_name(high_rule_name);
            mask_job.config.mlm_prob =
                mlm_prob > 0.0
                    ? mlm_prob
                    : gm::MaskConfig::default_mlm_prob(mask_job.config.strategy);
            const auto n = gm::run_mask(mask_job);
            std::fprintf(stderr, "wrote %zu mask plans to %s\n", n,
                         mask_job.out.c_str());
        } else if (app.got_subcommand(overlap)) {
            const auto report = gm::run_overlap(overlap_job);
            std::fprintf(stderr,
                         "probed %zu examples against %llu distinct %d-grams\n",
                         report.n_examples,
                         static_cast<unsigned long long>(report.reference_distinct),
                         report.n);
        } else if (app.got_subcommand(motif)) {
            const auto ranks = gm::run_motif(motif_job);
            if (motif_job.out.empty())
                std::fputs(gm::motif_ranks_to_string(ranks).c_str(), stdout);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
