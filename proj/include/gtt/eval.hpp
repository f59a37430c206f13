#ifndef GTT_EVAL_HPP
#define GTT_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gtt/bbox.hpp"
#include "gtt/dataset.hpp"

namespace gtt {

// One tracked sequence: per-frame predictions against ground truth,
// plus the failure/reinit events of the live protocol.
struct TrackRecord {
    struct Frame {
        int frame = 0;
        std::optional<BoundingBox> pred;
        std::optional<BoundingBox> gt;
        std::uint8_t attributes = 0;
        bool fallback = false;  // degenerate decode, previous box reused
    };
    std::string tracker_id;
    std::string sequence_id;
    std::vector<Frame> frames;
    std::vector<int> failure_frames;
    std::vector<int> reinit_frames;
    // per-frame tracking loop time (crop + forward + decode)
    double mean_frame_ms = 0, stddev_frame_ms = 0;
    int timed_frames = 0;
};

struct EvalParams {
    double failure_threshold = 0.0;  // failure when IoU <= this
    int reinit_delay = 5;            // frames between failure and reinit
    double robustness_sensitivity = 30.0;
};

// Accumulated per attribute bucket. Buckets are the five attributes,
// "none" for unflagged frames, and "all" over every evaluated frame.
struct BucketScore {
    double iou_sum = 0;
    int frames = 0;
    int failures = 0;

    double accuracy() const { return frames ? iou_sum / frames : 0.0; }
};

struct SequenceScore {
    std::map<std::string, BucketScore> buckets;
    int total_failures = 0;
    int evaluated_frames = 0;
};

// Pure protocol walk over a record: failure on annotated frames with
// IoU <= threshold, then a reinit gap of `reinit_delay` frames excluded
// from accuracy.
SequenceScore score_sequence(const TrackRecord& record, const EvalParams& params = {});

// R = exp(-sensitivity * failures / evaluated_frames).
double robustness_score(int failures, int evaluated_frames, double sensitivity = 30.0);

// Benchmark-level aggregate for one tracker: per-bucket accuracy and
// robustness averaged over sequences (unweighted).
struct TrackerScores {
    std::string tracker_id;
    struct Entry {
        double accuracy = 0;
        double robustness = 0;
        int failures = 0;  // raw counts, never hidden behind the mapping
        int frames = 0;
        int sequences = 0;
    };
    std::map<std::string, Entry> buckets;

    double overall_error() const;   // 1 - (A + R)/2 on the "all" bucket
    double accuracy_error() const;  // 1 - A
    double robustness_error() const;
};

TrackerScores aggregate_scores(const std::string& tracker_id,
                               const std::vector<SequenceScore>& scores,
                               const EvalParams& params = {});

// Per-attribute fractional ranking (rank 1 best, ties get the mean of
// tied ranks), averaged across attributes; overall = mean of the
// averaged accuracy and robustness ranks.
struct TrackerRank {
    std::string tracker_id;
    double accuracy_rank = 0;
    double robustness_rank = 0;
    double overall_rank = 0;
};
std::vector<TrackerRank> rank_trackers(const std::vector<TrackerScores>& tables);

// Report output. Rows mirror the ablation-table layout:
// variant, overall error, accuracy error, robustness error.
struct ReportRow {
    std::string name;
    double overall_error = 0;
    double accuracy_error = 0;
    double robustness_error = 0;
    bool failed = false;  // variant aborted; errors not meaningful
};
void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);
std::string format_report_table(const std::vector<ReportRow>& rows);
void write_rank_csv(const std::vector<TrackerRank>& ranks, const std::string& path);

} // namespace gtt

#endif
