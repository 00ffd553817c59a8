#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gsmsim/geometry.hpp"

namespace gsmsim {

// Access variants: legacy grants one request per AGCH message and allocates
// whole-PDCH USFs; "agch" packs four grants per message; "agch+eusf" adds the
// expanded USF allocation (block- and multiframe-scoped validity).
enum class Variant { legacy, agch, agch_eusf };

inline int grants_per_message(Variant v) { return v == Variant::legacy ? 1 : 4; }

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::legacy: return "legacy";
    case Variant::agch: return "agch";
    case Variant::agch_eusf: return "agch+eusf";
  }
  return "?";
}

enum class TrafficMode : std::uint8_t { one_shot, periodic };
enum class AllocMode : std::uint8_t { legacy, eusf_periodic, eusf_one_shot };

// USF values are 3 bits with 000 reserved: at most 7 distinct flags per PDCH.
inline constexpr int kMaxUsf = 7;

// A data-resource reservation. Legacy mode: the USF holds on the whole PDCH in
// every multiframe while the connection lives. eUSF periodic: valid in
// `block_set` during `valid_multiframes` consecutive multiframes out of every
// `valid_multiframes + gap_multiframes`, starting at `start_multiframe`. eUSF
// one-shot: a fixed set of reserved (multiframe, block) occurrences inside a
// window of `valid_multiframes` multiframes.
struct UsfAllocation {
  int pdch = -1;
  int usf = 0;
  AllocMode mode = AllocMode::legacy;
  std::vector<int> block_set;
  int valid_multiframes = 0;  // X
  int gap_multiframes = 0;    // non-valid multiframes per period (periodic)
  std::int64_t start_multiframe = 0;
  std::vector<std::pair<std::int64_t, int>> reserved;  // one-shot (mf, block), served in order

  bool valid_at(std::int64_t mf) const {
    switch (mode) {
      case AllocMode::legacy: return true;
      case AllocMode::eusf_periodic:
        return mf >= start_multiframe &&
               (mf - start_multiframe) % (valid_multiframes + gap_multiframes) < valid_multiframes;
      case AllocMode::eusf_one_shot:
        return mf >= start_multiframe && mf < start_multiframe + valid_multiframes;
    }
    return false;
  }
};

// A successful RACH request waiting for its grant. Served first-come
// first-served by success frame (device id breaking ties, which the engine
// guarantees by processing devices in ascending id order).
struct GrantRequest {
  std::int32_t device = -1;
  std::int64_t rach_success_frame = 0;
  std::int64_t deadline_frame = 0;  // rach_success_frame + response window
  TrafficMode mode = TrafficMode::one_shot;
  int payload_bytes = 0;
  double reporting_interval_s = 0.0;
};

struct AgchMessage {
  std::int64_t emit_frame = 0;
  struct Grant {
    GrantRequest request;
    UsfAllocation allocation;
  };
  std::vector<Grant> grants;
};

struct AllocDemand {
  AllocMode mode = AllocMode::legacy;
  int n_blocks = 1;                 // one-shot: total radio blocks needed
  double demand_blocks_per_s = 0.0; // periodic: guaranteed service rate required
};

// Book-keeping of every live reservation on the data PDCHs. Cells are
// (pdch, block, multiframe) slots; the calendar guarantees that all claimants
// of one cell carry pairwise distinct USF values, so any one of them can be
// named unambiguously by the per-block announcement.
class OccupancyCalendar {
 public:
  using Key = std::int32_t;

  OccupancyCalendar() : OccupancyCalendar(ChannelPlan{}, 1, 0) {}

  OccupancyCalendar(const ChannelPlan& plan, int valid_multiframes, int gap_multiframes)
      : first_pdch_(plan.first_data_pdch()),
        n_pdch_(plan.n_data_pdch()),
        blocks_(plan.blocks_per_multiframe()),
        x_(valid_multiframes),
        gap_(gap_multiframes),
        mf_duration_(plan.multiframe_duration()) {
    if (x_ < 1 || gap_ < 0) throw std::invalid_argument("need X >= 1 and M_gap >= 0");
    per_pdch_.resize(static_cast<std::size_t>(n_pdch_));
    for (auto& p : per_pdch_) p.periodic_cells.assign(static_cast<std::size_t>(blocks_ * period()), {});
  }

  int period() const { return x_ + gap_; }
  int valid_multiframes() const { return x_; }
  int blocks_per_multiframe() const { return blocks_; }
  double multiframe_duration() const { return mf_duration_; }

  // --- queries ---------------------------------------------------------

  struct Claimant {
    Key key;
    int usf;
    bool one_shot_reserved;  // reserved this exact occurrence
  };

  // Everyone allowed to be announced in cell (pdch, block, mf).
  void cell_claimants(int pdch, int block, std::int64_t mf, std::vector<Claimant>& out) const {
    out.clear();
    const Pdch& p = per(pdch);
    for (Key k : p.legacy_conns) out.push_back({k, claims_.at(k).alloc.usf, false});
    for (Key k : p.periodic_cells[cell_index(block, phase_of(mf))]) {
      const Claim& c = claims_.at(k);
      if (c.alloc.valid_at(mf)) out.push_back({k, c.alloc.usf, false});
    }
    if (auto it = p.one_shot_cells.find(occ_key(mf, block)); it != p.one_shot_cells.end())
      out.push_back({it->second, claims_.at(it->second).alloc.usf, true});
  }

  int legacy_count(int pdch) const { return static_cast<int>(per(pdch).legacy_conns.size()); }

  int legacy_total() const {
    int n = 0;
    for (const auto& p : per_pdch_) n += static_cast<int>(p.legacy_conns.size());
    return n;
  }

  std::size_t live_claims() const { return claims_.size(); }
  bool holds(Key k) const { return claims_.count(k) != 0; }
  const UsfAllocation& allocation_of(Key k) const { return claims_.at(k).alloc; }
  double demand_of(Key k) const { return claims_.at(k).demand_blocks_per_s; }

  // Guaranteed long-run service rate (blocks/s) of a periodic claim under
  // round-robin sharing: each cell occurs once per period and a cell with n
  // claimants guarantees 1/n of its occurrences.
  double guaranteed_rate(Key k) const {
    const Claim& c = claims_.at(k);
    if (c.alloc.mode != AllocMode::eusf_periodic) return 0.0;
    const Pdch& p = per(c.alloc.pdch);
    double per_period = 0.0;
    for (int b : c.alloc.block_set)
      for (int j = 0; j < x_; ++j) {
        const int phase = static_cast<int>((c.alloc.start_multiframe + j) % period());
        per_period += 1.0 / static_cast<double>(p.periodic_cells[cell_index(b, phase)].size());
      }
    return per_period / (period() * mf_duration_);
  }

  // --- allocation -------------------------------------------------------

  // Legacy first fit: first data PDCH with a free USF, lowest value first.
  std::optional<UsfAllocation> allocate_legacy(Key key) {
    for (int i = 0; i < n_pdch_; ++i) {
      Pdch& p = per_pdch_[static_cast<std::size_t>(i)];
      if (static_cast<int>(p.legacy_conns.size()) >= kMaxUsf) continue;
      int used = 0;
      for (Key k : p.legacy_conns) used |= 1 << claims_.at(k).alloc.usf;
      int usf = 1;
      while (used & (1 << usf)) ++usf;
      UsfAllocation a;
      a.pdch = first_pdch_ + i;
      a.usf = usf;
      a.mode = AllocMode::legacy;
      a.block_set.resize(static_cast<std::size_t>(blocks_));
      for (int b = 0; b < blocks_; ++b) a.block_set[static_cast<std::size_t>(b)] = b;
      p.legacy_conns.push_back(key);
      claims_.emplace(key, Claim{a, 0.0});
      return a;
    }
    return std::nullopt;
  }

  // Expanded-USF allocation for a periodic demand. Searches ascending PDCH,
  // then ascending start offset (soonest start first), accumulating block
  // strips in ascending block order until the guaranteed rate covers the
  // demand. A strip is usable only if joining it leaves every existing
  // claimant's guarantee at or above its own demand. The USF is the lowest
  // value distinct from every co-claimant of every claimed cell.
  std::optional<UsfAllocation> allocate_eusf_periodic(Key key, double demand_blocks_per_s,
                                                      std::int64_t now_mf) {
    if (!(demand_blocks_per_s > 0)) throw std::domain_error("periodic demand must be positive");
    const double cell_rate = 1.0 / (period() * mf_duration_);
    for (int i = 0; i < n_pdch_; ++i) {
      Pdch& p = per_pdch_[static_cast<std::size_t>(i)];
      for (int off = 0; off < period(); ++off) {
        const std::int64_t start = now_mf + off;
        std::vector<int> phases;
        for (int j = 0; j < x_; ++j) phases.push_back(static_cast<int>((start + j) % period()));

        std::vector<int> chosen;
        std::unordered_map<int, int> tentative;  // cell index -> +claimants
        double mine = 0.0;
        for (int b = 0; b < blocks_ && mine + 1e-12 < demand_blocks_per_s; ++b) {
          if (!strip_fits(p, b, phases, tentative, demand_blocks_per_s, cell_rate)) continue;
          double gain = 0.0;
          for (int ph : phases) {
            const int ci = cell_index(b, ph);
            const int n = static_cast<int>(p.periodic_cells[static_cast<std::size_t>(ci)].size()) +
                          tentative[ci] + 1;
            gain += cell_rate / n;
            tentative[ci] += 1;
          }
          chosen.push_back(b);
          mine += gain;
        }
        if (mine + 1e-12 < demand_blocks_per_s) continue;

        const int usf = lowest_free_usf(p, chosen, phases);
        if (usf == 0) continue;

        UsfAllocation a;
        a.pdch = first_pdch_ + i;
        a.usf = usf;
        a.mode = AllocMode::eusf_periodic;
        a.block_set = chosen;
        a.valid_multiframes = x_;
        a.gap_multiframes = gap_;
        a.start_multiframe = start;
        for (int b : chosen)
          for (int ph : phases)
            p.periodic_cells[static_cast<std::size_t>(cell_index(b, ph))].push_back(key);
        claims_.emplace(key, Claim{a, demand_blocks_per_s});
        return a;
      }
    }
    return std::nullopt;
  }

  // Expanded-USF allocation for a one-shot report of n_blocks radio blocks:
  // reserves n_blocks free cell occurrences inside the earliest window of
  // `valid_multiframes` consecutive multiframes (starting strictly after
  // now_mf) that can hold them. Reserved occurrences are exclusive, so the
  // report always completes at its last reserved block.
  std::optional<UsfAllocation> allocate_eusf_one_shot(Key key, int n_blocks, std::int64_t now_mf) {
    if (n_blocks < 1) throw std::domain_error("one-shot demand must need at least one block");
    if (n_blocks > x_ * blocks_) return std::nullopt;  // cannot fit any window

    std::int64_t best_start = -1;
    int best_pdch = -1;
    for (int i = 0; i < n_pdch_; ++i) {
      const std::int64_t s = find_window(per_pdch_[static_cast<std::size_t>(i)],
                                         std::max(now_mf + 1, std::int64_t{0}), n_blocks);
      if (best_start < 0 || s < best_start) {
        best_start = s;
        best_pdch = i;
      }
    }
    Pdch& p = per_pdch_[static_cast<std::size_t>(best_pdch)];
    UsfAllocation a;
    a.pdch = first_pdch_ + best_pdch;
    a.mode = AllocMode::eusf_one_shot;
    a.valid_multiframes = x_;
    a.gap_multiframes = gap_;
    a.start_multiframe = best_start;
    int usf_taken = 0;
    for (std::int64_t mf = best_start; mf < best_start + x_ && static_cast<int>(a.reserved.size()) < n_blocks; ++mf)
      for (int b = 0; b < blocks_ && static_cast<int>(a.reserved.size()) < n_blocks; ++b)
        if (cell_free(p, b, mf)) {
          a.reserved.emplace_back(mf, b);
          for (const auto& cl : scratch_claimants(p, b, mf)) usf_taken |= 1 << cl;
        }
    assert(static_cast<int>(a.reserved.size()) == n_blocks);
    int usf = 1;
    while (usf <= kMaxUsf && (usf_taken & (1 << usf))) ++usf;
    if (usf > kMaxUsf) return std::nullopt;
    a.usf = usf;
    for (const auto& [mf, b] : a.reserved) {
      p.one_shot_cells.emplace(occ_key(mf, b), key);
      if (std::find(a.block_set.begin(), a.block_set.end(), b) == a.block_set.end())
        a.block_set.push_back(b);
    }
    std::sort(a.block_set.begin(), a.block_set.end());
    p.one_shot_hint = std::max(p.one_shot_hint, best_start);
    claims_.emplace(key, Claim{a, 0.0});
    return a;
  }

  std::optional<UsfAllocation> allocate(Key key, const AllocDemand& d, std::int64_t now_mf) {
    switch (d.mode) {
      case AllocMode::legacy: return allocate_legacy(key);
      case AllocMode::eusf_periodic: return allocate_eusf_periodic(key, d.demand_blocks_per_s, now_mf);
      case AllocMode::eusf_one_shot: return allocate_eusf_one_shot(key, d.n_blocks, now_mf);
    }
    return std::nullopt;
  }

  // Marks a reserved one-shot occurrence as consumed (it is being served).
  void consume_reserved(Key key, std::int64_t mf, int block) {
    Claim& c = claims_.at(key);
    Pdch& p = per_pdch_[static_cast<std::size_t>(c.alloc.pdch - first_pdch_)];
    const auto it = p.one_shot_cells.find(occ_key(mf, block));
    assert(it != p.one_shot_cells.end() && it->second == key);
    p.one_shot_cells.erase(it);
  }

  void release(Key key) {
    const auto it = claims_.find(key);
    if (it == claims_.end()) throw std::logic_error("release of an allocation that is not held");
    const UsfAllocation& a = it->second.alloc;
    Pdch& p = per_pdch_[static_cast<std::size_t>(a.pdch - first_pdch_)];
    switch (a.mode) {
      case AllocMode::legacy:
        std::erase(p.legacy_conns, key);
        break;
      case AllocMode::eusf_periodic:
        for (int b : a.block_set)
          for (int j = 0; j < x_; ++j)
            std::erase(p.periodic_cells[static_cast<std::size_t>(cell_index(
                           b, static_cast<int>((a.start_multiframe + j) % period())))],
                       key);
        break;
      case AllocMode::eusf_one_shot:
        for (const auto& [mf, b] : a.reserved) p.one_shot_cells.erase(occ_key(mf, b));
        break;
    }
    claims_.erase(it);
  }

 private:
  struct Claim {
    UsfAllocation alloc;
    double demand_blocks_per_s;
  };

  struct Pdch {
    std::vector<Key> legacy_conns;
    std::vector<std::vector<Key>> periodic_cells;  // [block * period + phase]
    std::unordered_map<std::int64_t, Key> one_shot_cells;
    std::int64_t one_shot_hint = 0;
  };

  const Pdch& per(int pdch) const { return per_pdch_.at(static_cast<std::size_t>(pdch - first_pdch_)); }

  int phase_of(std::int64_t mf) const { return static_cast<int>(mf % period()); }
  int cell_index(int block, int phase) const { return block * period() + phase; }
  static std::int64_t occ_key(std::int64_t mf, int block) { return mf * 16 + block; }

  // Can `key` join block strip b at these phases without starving anyone?
  bool strip_fits(const Pdch& p, int b, const std::vector<int>& phases,
                  const std::unordered_map<int, int>& tentative, double my_demand,
                  double cell_rate) const {
    std::vector<Key> affected;
    for (int ph : phases) {
      const auto& cell = p.periodic_cells[static_cast<std::size_t>(cell_index(b, ph))];
      int extra = 0;
      if (auto it = tentative.find(cell_index(b, ph)); it != tentative.end()) extra = it->second;
      if (static_cast<int>(cell.size()) + extra + 1 > kMaxUsf) return false;
      for (Key k : cell)
        if (std::find(affected.begin(), affected.end(), k) == affected.end()) affected.push_back(k);
    }
    for (Key k : affected) {
      const Claim& c = claims_.at(k);
      double guar = 0.0;
      for (int cb : c.alloc.block_set)
        for (int j = 0; j < x_; ++j) {
          const int ph = static_cast<int>((c.alloc.start_multiframe + j) % period());
          const int ci = cell_index(cb, ph);
          int n = static_cast<int>(p.periodic_cells[static_cast<std::size_t>(ci)].size());
          if (auto it = tentative.find(ci); it != tentative.end()) n += it->second;
          if (cb == b && std::find(phases.begin(), phases.end(), ph) != phases.end()) n += 1;
          guar += cell_rate / n;
        }
      if (guar + 1e-12 < c.demand_blocks_per_s) return false;
    }
    (void)my_demand;
    return true;
  }

  // Lowest USF distinct from every co-claimant of every claimed cell (periodic
  // co-claimants plus any one-shot reservation crossing those cells); 0 if the
  // flag space is exhausted.
  int lowest_free_usf(const Pdch& p, const std::vector<int>& blocks,
                      const std::vector<int>& phases) const {
    int taken = 0;
    for (int b : blocks)
      for (int ph : phases)
        for (Key k : p.periodic_cells[static_cast<std::size_t>(cell_index(b, ph))])
          taken |= 1 << claims_.at(k).alloc.usf;
    for (const auto& [okey, k] : p.one_shot_cells) {
      const int b = static_cast<int>(okey % 16);
      const int ph = static_cast<int>((okey / 16) % period());
      if (std::find(blocks.begin(), blocks.end(), b) != blocks.end() &&
          std::find(phases.begin(), phases.end(), ph) != phases.end())
        taken |= 1 << claims_.at(k).alloc.usf;
    }
    for (int usf = 1; usf <= kMaxUsf; ++usf)
      if (!(taken & (1 << usf))) return usf;
    return 0;
  }

  bool cell_free(const Pdch& p, int block, std::int64_t mf) const {
    if (p.one_shot_cells.count(occ_key(mf, block))) return false;
    return p.periodic_cells[static_cast<std::size_t>(cell_index(block, phase_of(mf)))].empty();
  }

  // USFs visible in (block, mf) even when the cell counts as free for
  // reservation purposes (defensive: cells are free here by construction).
  std::vector<int> scratch_claimants(const Pdch& p, int block, std::int64_t mf) const {
    std::vector<int> usfs;
    for (Key k : p.periodic_cells[static_cast<std::size_t>(cell_index(block, phase_of(mf)))])
      usfs.push_back(claims_.at(k).alloc.usf);
    return usfs;
  }

  // Earliest window start s >= from with at least n free cells in [s, s+X).
  std::int64_t find_window(const Pdch& p, std::int64_t from, int n_blocks) const {
    std::int64_t s = std::max(from, p.one_shot_hint - (x_ - 1));
    for (std::int64_t guard = 0; guard < (1 << 26); ++guard, ++s) {
      int free = 0;
      for (std::int64_t mf = s; mf < s + x_; ++mf)
        for (int b = 0; b < blocks_; ++b)
          if (cell_free(p, b, mf)) ++free;
      if (free >= n_blocks) return s;
    }
    throw std::logic_error("one-shot window search did not terminate");
  }

  int first_pdch_;
  int n_pdch_;
  int blocks_;
  int x_;
  int gap_;
  double mf_duration_;
  std::vector<Pdch> per_pdch_;
  std::unordered_map<Key, Claim> claims_;
};

// FIFO of successful RACH requests awaiting AGCH delivery. Requests whose
// deadline passed while queued are purged without consuming message capacity
// (the base station simply never answers them); a request that reaches the
// head alive either gets a grant or, if no data resources exist, is dropped
// silently — the device only learns of either failure by S-window expiry.
class AgchQueue {
 public:
  void push(const GrantRequest& r) { q_.push_back(r); }
  std::size_t size() const { return q_.size(); }
  bool empty() const { return q_.empty(); }

  struct EmitResult {
    std::vector<AgchMessage::Grant> granted;
    int deadline_blocked = 0;
    int data_blocked = 0;        // requests discarded for lack of data resources
    int data_block_events = 0;   // failed allocation attempts (>= data_blocked with retain)
  };

  // try_alloc: (const GrantRequest&) -> std::optional<UsfAllocation>
  template <class AllocFn>
  EmitResult emit(std::int64_t now, int max_grants, bool retain_on_block, AllocFn&& try_alloc) {
    EmitResult res;
    int considered = 0;
    while (considered < max_grants && !q_.empty()) {
      if (q_.front().deadline_frame < now) {
        ++res.deadline_blocked;
        q_.pop_front();
        continue;
      }
      GrantRequest req = q_.front();
      ++considered;
      auto alloc = try_alloc(req);
      if (alloc) {
        q_.pop_front();
        res.granted.push_back({req, *alloc});
      } else {
        ++res.data_block_events;
        if (retain_on_block) break;  // head stays for the next block
        ++res.data_blocked;
        q_.pop_front();
      }
    }
    return res;
  }

 private:
  std::deque<GrantRequest> q_;
};

}  // namespace gsmsim
