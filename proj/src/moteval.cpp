#include "pitchtrack/moteval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "pitchtrack/errors.hpp"
#include "pitchtrack/util.hpp"

namespace pitchtrack::mot {

namespace {
// Stand-in for +infinity that keeps potential arithmetic finite.
constexpr double kForbidden = 1e30;
}  // namespace

Assignment hungarian(const nn::Matrix& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) return {std::vector<int>(rows, -1), 0.0};
  const int n = std::max(rows, cols);

  auto at = [&](int i, int j) -> double {
    if (i >= rows || j >= cols) return 0.0;  // padding
    const double c = cost(i, j);
    if (!std::isfinite(c)) return kForbidden;
    return c;
  };

  // Potentials formulation; rows and columns are 1-based, column 0 is the
  // staging slot for the row currently being inserted.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment out;
  out.row_to_col.assign(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i < 0 || i >= rows || j - 1 >= cols) continue;
    if (at(i, j - 1) >= kForbidden) continue;  // only forbidden cells remained
    out.row_to_col[i] = j - 1;
  }
  for (int i = 0; i < rows; ++i)
    if (out.row_to_col[i] >= 0) out.cost += cost(i, out.row_to_col[i]);
  return out;
}

FrameCounts match_frame(const std::vector<std::pair<int, WorldPoint>>& gt,
                        const std::vector<std::pair<int, WorldPoint>>& hyp,
                        MatchState& state, double max_dist,
                        std::vector<std::pair<int, int>>* out_matches) {
  FrameCounts counts;
  counts.gt = static_cast<int>(gt.size());

  std::map<int, WorldPoint> gt_by_id, hyp_by_id;
  for (const auto& [id, p] : gt) {
    if (!gt_by_id.emplace(id, p).second)
      throw std::invalid_argument("duplicate gt id " + std::to_string(id));
  }
  for (const auto& [id, p] : hyp) {
    if (!hyp_by_id.emplace(id, p).second)
      throw std::invalid_argument("duplicate hyp id " + std::to_string(id));
  }

  std::vector<std::pair<int, int>> matches;
  std::set<int> gt_done, hyp_done;

  // Temporal consistency first: keep yesterday's pairs that still hold.
  for (const auto& [g, h] : state.prev_frame) {
    const auto gi = gt_by_id.find(g);
    const auto hi = hyp_by_id.find(h);
    if (gi == gt_by_id.end() || hi == hyp_by_id.end()) continue;
    if (distance(gi->second, hi->second) > max_dist) continue;
    matches.emplace_back(g, h);
    gt_done.insert(g);
    hyp_done.insert(h);
  }

  std::vector<int> gt_rest, hyp_rest;
  for (const auto& [id, p] : gt_by_id)
    if (!gt_done.count(id)) gt_rest.push_back(id);
  for (const auto& [id, p] : hyp_by_id)
    if (!hyp_done.count(id)) hyp_rest.push_back(id);

  if (!gt_rest.empty() && !hyp_rest.empty()) {
    nn::Matrix cost(gt_rest.size(), hyp_rest.size());
    for (std::size_t i = 0; i < gt_rest.size(); ++i)
      for (std::size_t j = 0; j < hyp_rest.size(); ++j) {
        const double d = distance(gt_by_id[gt_rest[i]], hyp_by_id[hyp_rest[j]]);
        cost(i, j) = d <= max_dist ? d : std::numeric_limits<double>::infinity();
      }
    const Assignment a = hungarian(cost);
    for (std::size_t i = 0; i < gt_rest.size(); ++i)
      if (a.row_to_col[i] >= 0)
        matches.emplace_back(gt_rest[i], hyp_rest[a.row_to_col[i]]);
  }

  std::sort(matches.begin(), matches.end());
  counts.matches = static_cast<int>(matches.size());
  counts.fn = static_cast<int>(gt_by_id.size()) - counts.matches;
  counts.fp = static_cast<int>(hyp_by_id.size()) - counts.matches;

  state.prev_frame.clear();
  for (const auto& [g, h] : matches) {
    const auto last = state.last_match.find(g);
    if (last != state.last_match.end() && last->second != h) ++counts.idsw;
    state.last_match[g] = h;
    state.prev_frame[g] = h;
  }
  if (out_matches) *out_matches = matches;
  return counts;
}

MOTReport evaluate(const FrameSet& gt, const FrameSet& hyp, double max_dist) {
  if (gt.empty()) throw EmptyDataset("ground truth has no frames");
  const int first = gt.begin()->first;
  const int last = gt.rbegin()->first;
  for (const auto& [frame, items] : hyp)
    if (frame < first || frame > last)
      throw FrameRangeMismatch("hypothesis frame " + std::to_string(frame) +
                               " outside ground-truth span [" + std::to_string(first) +
                               ", " + std::to_string(last) + "]");

  MatchState state;
  MOTReport r;
  std::map<int, std::pair<int, int>> life;  // gt id -> (present, matched)
  static const std::vector<std::pair<int, WorldPoint>> kEmpty;

  for (int frame = first; frame <= last; ++frame) {
    const auto gi = gt.find(frame);
    const auto hi = hyp.find(frame);
    const auto& gt_items = gi != gt.end() ? gi->second : kEmpty;
    const auto& hyp_items = hi != hyp.end() ? hi->second : kEmpty;
    std::vector<std::pair<int, int>> matches;
    const FrameCounts c = match_frame(gt_items, hyp_items, state, max_dist, &matches);
    r.fn += c.fn;
    r.fp += c.fp;
    r.idsw += c.idsw;
    r.gt_count += c.gt;
    for (const auto& [id, p] : gt_items) ++life[id].first;
    for (const auto& [g, h] : matches) ++life[g].second;
  }

  if (r.gt_count == 0) throw EmptyDataset("ground truth has no objects");
  r.mota = 1.0 - static_cast<double>(r.fn + r.fp + r.idsw) / r.gt_count;
  r.gt_identities = static_cast<int>(life.size());
  for (const auto& [id, counts] : life) {
    const double ratio = static_cast<double>(counts.second) / counts.first;
    if (ratio >= 0.8)
      ++r.mt;
    else if (ratio <= 0.2)
      ++r.ml;
    else
      ++r.pt;
  }
  return r;
}

std::string format_report(const MOTReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "MOTA %.4f | IDSW %ld | FP %ld | FN %ld | GT %ld | MT %d PT %d ML %d",
                r.mota, r.idsw, r.fp, r.fn, r.gt_count, r.mt, r.pt, r.ml);
  return buf;
}

std::string report_key_values(const MOTReport& r) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", r.mota);
  os << "mota=" << buf << "\n"
     << "idsw=" << r.idsw << "\n"
     << "fp=" << r.fp << "\n"
     << "fn=" << r.fn << "\n"
     << "gt_count=" << r.gt_count << "\n"
     << "mt=" << r.mt << "\n"
     << "pt=" << r.pt << "\n"
     << "ml=" << r.ml << "\n";
  return os.str();
}

SuiteReport evaluate_suite(const std::vector<std::pair<FrameSet, FrameSet>>& pairs,
                           double max_dist) {
  if (pairs.empty()) throw EmptyDataset("no episodes to evaluate");
  // Episodes are independent; score them on the worker pool.
  std::vector<MOTReport> reports(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int i) {
    try {
      reports[i] = evaluate(pairs[i].first, pairs[i].second, max_dist);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SuiteReport suite;
  long fn = 0, fp = 0, idsw = 0, gt_count = 0;
  double mota_sum = 0.0;
  for (const MOTReport& r : reports) {
    suite.per_episode.push_back(r);
    fn += r.fn;
    fp += r.fp;
    idsw += r.idsw;
    gt_count += r.gt_count;
    mota_sum += r.mota;
    suite.pooled.mt += r.mt;
    suite.pooled.pt += r.pt;
    suite.pooled.ml += r.ml;
    suite.pooled.gt_identities += r.gt_identities;
  }
  suite.pooled.fn = fn;
  suite.pooled.fp = fp;
  suite.pooled.idsw = idsw;
  suite.pooled.gt_count = gt_count;
  suite.pooled.mota = 1.0 - static_cast<double>(fn + fp + idsw) / gt_count;
  suite.mean_mota = mota_sum / pairs.size();
  return suite;
}

}  // namespace pitchtrack::mot
