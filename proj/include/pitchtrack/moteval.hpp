#pragma once

#include <map>
#include <string>
#include <vector>

#include "pitchtrack/nn.hpp"
#include "pitchtrack/trackcsv.hpp"
#include "pitchtrack/types.hpp"

// CLEAR-MOT scoring on ground-plane points: frame-by-frame correspondence
// with temporal-consistency preference (surviving pairs persist before the
// assignment solver runs), a 1 m Euclidean gate in place of box IoU, and
// MT/PT/ML classification at the 80%/20% life-span thresholds.

namespace pitchtrack::mot {

struct Assignment {
  std::vector<int> row_to_col;  // -1 for unassigned / forbidden rows
  double cost = 0.0;            // sum over assigned finite pairs
};

// Minimum-cost one-to-one assignment (Kuhn-Munkres with potentials).
// Rectangular matrices are padded internally; +infinity marks forbidden
// pairs. Ties resolve toward lower (row, col) indices.
Assignment hungarian(const nn::Matrix& cost);

struct MatchState {
  std::map<int, int> last_match;  // gt id -> hyp id of the last known match
  std::map<int, int> prev_frame;  // matches of the immediately preceding frame
};

struct FrameCounts {
  int fn = 0, fp = 0, idsw = 0, matches = 0, gt = 0;
};

// One frame of correspondence. Pairs from the previous frame that are still
// within max_dist persist; the rest go through the assignment solver with
// pairs beyond max_dist forbidden. An identity switch is counted when a gt
// id is matched to a different hyp id than its last known match.
FrameCounts match_frame(const std::vector<std::pair<int, WorldPoint>>& gt,
                        const std::vector<std::pair<int, WorldPoint>>& hyp,
                        MatchState& state, double max_dist,
                        std::vector<std::pair<int, int>>* out_matches = nullptr);

struct MOTReport {
  double mota = 0.0;
  long idsw = 0, fp = 0, fn = 0, gt_count = 0;
  int mt = 0, pt = 0, ml = 0;
  int gt_identities = 0;
};

// Accumulates counts over the ground-truth frame span. Hypothesis frames
// outside that span raise FrameRangeMismatch.
MOTReport evaluate(const FrameSet& gt, const FrameSet& hyp, double max_dist = 1.0);

std::string format_report(const MOTReport& r);
// Machine-readable `key=value` lines.
std::string report_key_values(const MOTReport& r);

struct SuiteReport {
  MOTReport pooled;            // counts summed across episodes
  double mean_mota = 0.0;      // mean of per-episode MOTAs
  std::vector<MOTReport> per_episode;
};

SuiteReport evaluate_suite(const std::vector<std::pair<FrameSet, FrameSet>>& pairs,
                           double max_dist = 1.0);

}  // namespace pitchtrack::mot
