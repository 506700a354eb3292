#include "genemask/pipeline.hpp"

#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include "genemask/parallel.hpp"
#include "genemask/rng.hpp"

namespace genemask {

int default_workers() {
    if (const char* env = std::getenv("GENEMASK_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

CountsBundle run_count(const CountJob& job) {
    const int workers = std::max(1, job.workers);

    // Record-level sharding behind a bounded queue: one shard counter per
    // worker, merged at the end. Merge order cannot matter because both the
    // tables and the digest combine by commutative addition.
    std::mutex mu;
    std::condition_variable can_push, can_pop;
    std::deque<FastaRecord> queue;
    bool done = false;
    const std::size_t cap = static_cast<std::size_t>(workers) * 2 + 2;

    std::vector<CorpusCounter> shards;
    shards.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) shards.emplace_back(job.kmax);

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (;;) {
                FastaRecord record;
                {
                    std::unique_lock lock(mu);
                    can_pop.wait(lock, [&] { return !queue.empty() || done; });
                    if (queue.empty()) return;
                    record = std::move(queue.front());
                    queue.pop_front();
                }
                can_push.notify_one();
                shards[static_cast<std::size_t>(t)].add_sequence(record.sequence);
            }
        });
    }

    try {
        stream_fasta(job.fasta, [&](FastaRecord&& r) {
            std::unique_lock lock(mu);
            can_push.wait(lock, [&] { return queue.size() < cap; });
            queue.push_back(std::move(r));
            lock.unlock();
            can_pop.notify_one();
        });
    } catch (...) {
        {
            std::lock_guard lock(mu);
            done = true;
        }
        can_pop.notify_all();
        for (auto& th : pool) th.join();
        throw;
    }
    {
        std::lock_guard lock(mu);
        done = true;
    }
    can_pop.notify_all();
    for (auto& th : pool) th.join();

    CountsBundle bundle = std::move(shards.front()).take();
    for (std::size_t i = 1; i < shards.size(); ++i)
        bundle.merge(std::move(shards[i]).take());

    if (!job.out.empty()) save_counts(bundle, job.out);
    return bundle;
}

Grank run_grank(const GrankJob& job) {
    const CountsBundle bundle = load_counts(job.counts);
    const ProbabilityModel model(bundle, job.c);
    Grank grank = Grank::build(model, std::max(1, job.workers));
    if (!job.out.empty()) grank.save(job.out);
    return grank;
}

bool run_vocab(const VocabJob& job) {
    const CountsBundle bundle = load_counts(job.counts);
    const ProbabilityModel model(bundle, job.c);
    bool truncated = false;
    const MaskingVocabulary vocab = MaskingVocabulary::build(
        model, job.min_freq, job.size, std::max(1, job.workers), &truncated);
    if (!job.out.empty()) vocab.save(job.out);
    return truncated;
}

std::size_t run_segment(const SegmentJob& job) {
    GeneBoundarySet boundaries;
    const bool have_boundaries = !job.boundaries.empty();
    if (have_boundaries) boundaries = GeneBoundarySet::load(job.boundaries);

    std::ofstream out(job.out, std::ios::binary);
    if (!out) throw IoError("cannot open '" + job.out + "' for writing");

    std::size_t written = 0;
    stream_fasta(job.fasta, [&](FastaRecord&& record) {
        const auto segments = build_segments_for_record(
            record, job.seed, have_boundaries ? &boundaries : nullptr);
        for (const auto& s : segments) {
            out << s.chrom << '\t' << s.start << '\t' << s.length << '\t'
                << s.sequence << '\n';
            ++written;
        }
    });
    if (!out) throw IoError("write failed for '" + job.out + "'");
    return written;
}

std::size_t run_mask(const MaskJob& job) {
    job.config.validate();

    Grank grank_table = [&] {
        if (job.config.strategy == Strategy::genemask) {
            if (job.grank.empty())
                throw Error("the genemask strategy needs a 6-mer ranking file");
            return Grank::load(job.grank);
        }
        std::vector<PmiResult> blank(4096);
        for (std::uint32_t code = 0; code < 4096; ++code)
            blank[code].kmer = PackedKmer{code, 6};
        return Grank::from_entries(std::move(blank));
    }();
    MaskingVocabulary vocab = [&] {
        if (job.config.strategy == Strategy::pmivoc) {
            if (job.vocab.empty())
                throw Error("the pmivoc strategy needs a vocabulary file");
            return MaskingVocabulary::load(job.vocab);
        }
        return MaskingVocabulary::from_entries({});
    }();

    const auto segments = read_segments(job.segments);
    std::vector<std::string> lines(segments.size());
    parallel_for(segments.size(), std::max(1, job.workers), [&](std::size_t idx) {
        const Segment& seg = segments[idx];
        const std::string seq_id = seg.chrom + ":" + std::to_string(seg.start);
        MaskConfig config = job.config;
        config.seed = derive_seed(job.config.seed, seq_id);
        const TokenizedSequence tokens(seq_id, seg.sequence, config.k);
        MaskPlan plan;
        if (tokens.n_tokens() == 0) {
            // Shorter than one window: legal segment, nothing maskable.
            plan.seq_id = seq_id;
            plan.strategy = config.strategy;
            plan.seed = job.config.seed;
            lines[idx] = to_jsonl(plan);
            return;
        }
        switch (config.strategy) {
            case Strategy::genemask:
                plan = plan_genemask(tokens, grank_table, config);
                break;
            case Strategy::random:
                plan = plan_random(tokens, config);
                break;
            case Strategy::pmivoc:
                plan = plan_pmivoc(tokens, vocab, config);
                break;
        }
        plan.seed = job.config.seed; // echo the run seed, not the derived one
        lines[idx] = to_jsonl(plan);
    });

    std::ofstream out(job.out, std::ios::binary);
    if (!out) throw IoError("cannot open '" + job.out + "' for writing");
    for (const auto& line : lines) out << line << '\n';
    if (!out) throw IoError("write failed for '" + job.out + "'");
    return lines.size();
}

OverlapReport run_overlap(const OverlapJob& job) {
    OverlapReport report = ngram_overlap_files(job.reference, job.probe, job.n);
    if (!job.out_json.empty()) write_overlap_json(report, job.out_json);
    if (!job.out_ratios.empty()) write_overlap_ratios(report, job.out_ratios);
    return report;
}

std::vector<MotifRank> run_motif(const MotifJob& job) {
    const Grank grank = Grank::load(job.grank);
    const MotifPattern pattern(job.pattern);
    auto ranks = motif_ranks(pattern, grank, job.top5);
    if (!job.out.empty()) write_motif_ranks(ranks, job.out);
    return ranks;
}

} // namespace genemask
