#include "gtt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gtt {

namespace {

const std::pair<std::uint8_t, const char*> kBucketAttrs[] = {
    {attr_occlusion, "occlusion"},
    {attr_illumination_change, "illumination_change"},
    {attr_motion_change, "motion_change"},
    {attr_size_change, "size_change"},
    {attr_camera_motion, "camera_motion"},
};

std::vector<std::string> frame_buckets(std::uint8_t attrs) {
    std::vector<std::string> out{"all"};
    bool any = false;
    for (const auto& [bit, name] : kBucketAttrs) {
        if (attrs & bit) {
            out.emplace_back(name);
            any = true;
        }
    }
    if (!any) out.emplace_back("none");
    return out;
}

} // namespace

SequenceScore score_sequence(const TrackRecord& record, const EvalParams& params) {
    SequenceScore score;
    bool any_gt = false;
    long gap_until = -1;  // frames strictly below this are inside a reinit gap
    for (const auto& fr : record.frames) {
        if (!fr.gt) continue;
        any_gt = true;
        if (!fr.pred) continue;
        if (fr.frame < gap_until) continue;
        const double overlap = iou(*fr.pred, *fr.gt);
        if (overlap <= params.failure_threshold) {
            ++score.total_failures;
            for (const auto& b : frame_buckets(fr.attributes)) ++score.buckets[b].failures;
            gap_until = static_cast<long>(fr.frame) + params.reinit_delay;
            continue;  // the failed frame is excluded from accuracy
        }
        ++score.evaluated_frames;
        for (const auto& b : frame_buckets(fr.attributes)) {
            auto& acc = score.buckets[b];
            acc.iou_sum += overlap;
            ++acc.frames;
        }
    }
    if (!any_gt) throw std::runtime_error("score_sequence: record has no ground truth");
    return score;
}

double robustness_score(int failures, int evaluated_frames, double sensitivity) {
    if (evaluated_frames < 1)
        throw std::invalid_argument("robustness_score: need at least 1 evaluated frame");
    return std::exp(-sensitivity * static_cast<double>(failures) / evaluated_frames);
}

double TrackerScores::overall_error() const {
    return 1.0 - 0.5 * (1.0 - accuracy_error() + 1.0 - robustness_error());
}
double TrackerScores::accuracy_error() const {
    const auto it = buckets.find("all");
    return it == buckets.end() ? 1.0 : 1.0 - it->second.accuracy;
}
double TrackerScores::robustness_error() const {
    const auto it = buckets.find("all");
    return it == buckets.end() ? 1.0 : 1.0 - it->second.robustness;
}

TrackerScores aggregate_scores(const std::string& tracker_id,
                               const std::vector<SequenceScore>& scores,
                               const EvalParams& params) {
    TrackerScores out;
    out.tracker_id = tracker_id;
    // mean over sequences, per bucket; sequences without a bucket do not
    // contribute to it
    std::map<std::string, std::pair<double, double>> acc;  // accuracy sum, robustness sum
    for (const auto& s : scores) {
        for (const auto& [name, b] : s.buckets) {
            auto& e = out.buckets[name];
            if (b.frames == 0 && b.failures == 0) continue;
            acc[name].first += b.accuracy();
            const int denom = std::max(1, b.frames + b.failures);
            acc[name].second += robustness_score(b.failures, denom, params.robustness_sensitivity);
            e.failures += b.failures;
            e.frames += b.frames;
            ++e.sequences;
        }
    }
    for (auto& [name, e] : out.buckets) {
        if (e.sequences > 0) {
            e.accuracy = acc[name].first / e.sequences;
            e.robustness = acc[name].second / e.sequences;
        }
    }
    return out;
}

std::vector<TrackerRank> rank_trackers(const std::vector<TrackerScores>& tables) {
    if (tables.size() < 2)
        throw std::invalid_argument("rank_trackers: need at least 2 trackers");

    // attribute buckets must agree across trackers ("all" is excluded
    // from ranking: ranks are averaged across attributes)
    std::vector<std::string> attrs;
    for (const auto& [name, e] : tables.front().buckets)
        if (name != "all") attrs.push_back(name);
    for (const auto& t : tables) {
        std::vector<std::string> a;
        for (const auto& [name, e] : t.buckets)
            if (name != "all") a.push_back(name);
        if (a != attrs)
            throw std::invalid_argument("rank_trackers: mismatched attribute sets");
    }

    const std::size_t n = tables.size();
    std::vector<double> acc_rank_sum(n, 0), rob_rank_sum(n, 0);

    auto fractional_ranks = [&](const std::vector<double>& values) {
        // higher value -> better -> lower rank; ties share the mean rank
        std::vector<double> ranks(n, 0);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
            const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
            i = j + 1;
        }
        return ranks;
    };

    for (const auto& attr : attrs) {
        std::vector<double> acc(n), rob(n);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] = tables[i].buckets.at(attr).accuracy;
            rob[i] = tables[i].buckets.at(attr).robustness;
        }
        const auto ar = fractional_ranks(acc);
        const auto rr = fractional_ranks(rob);
        for (std::size_t i = 0; i < n; ++i) {
            acc_rank_sum[i] += ar[i];
            rob_rank_sum[i] += rr[i];
        }
    }

    std::vector<TrackerRank> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].tracker_id = tables[i].tracker_id;
        out[i].accuracy_rank = acc_rank_sum[i] / static_cast<double>(attrs.size());
        out[i].robustness_rank = rob_rank_sum[i] / static_cast<double>(attrs.size());
        out[i].overall_rank = 0.5 * (out[i].accuracy_rank + out[i].robustness_rank);
    }
    return out;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write report: " + path);
    f << "variant,overall_error,accuracy_error,robustness_error,status\n";
    f << std::setprecision(6) << std::fixed;
    for (const auto& r : rows) {
        if (r.failed)
            f << r.name << ",,,,failed\n";
        else
            f << r.name << "," << r.overall_error << "," << r.accuracy_error << ","
              << r.robustness_error << ",ok\n";
    }
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
    std::size_t name_w = 12;
    for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(name_w) + 2) << "Variant"
       << std::right << std::setw(10) << "Overall" << std::setw(10) << "Accuracy"
       << std::setw(12) << "Robustness" << "\n";
    os << std::setprecision(3) << std::fixed;
    for (const auto& r : rows) {
        os << std::left << std::setw(static_cast<int>(name_w) + 2) << r.name << std::right;
        if (r.failed)
            os << std::setw(10) << "failed" << std::setw(10) << "-" << std::setw(12) << "-";
        else
            os << std::setw(10) << r.overall_error << std::setw(10) << r.accuracy_error
               << std::setw(12) << r.robustness_error;
        os << "\n";
    }
    return os.str();
}

void write_rank_csv(const std::vector<TrackerRank>& ranks, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write rank report: " + path);
    f << "method,overall_rank,accuracy_rank,robustness_rank\n";
    f << std::setprecision(6) << std::fixed;
    for (const auto& r : ranks)
        f << r.tracker_id << "," << r.overall_rank << "," << r.accuracy_rank << ","
          << r.robustness_rank << "\n";
}

} // namespace gtt
