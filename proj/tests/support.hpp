#pragma once

#include <string>
#include <vector>

#include "gsmsim/allocator.hpp"

namespace gsmsim::testing {

// Scans every (pdch, block, multiframe) cell over [mf_lo, mf_hi) and verifies
// that co-valid claimants carry pairwise distinct USF values. Returns an empty
// string on success, else a description of the first violation.
inline std::string scan_distinct_usf(const OccupancyCalendar& cal, const ChannelPlan& plan,
                                     std::int64_t mf_lo, std::int64_t mf_hi) {
  std::vector<OccupancyCalendar::Claimant> cs;
  for (std::int64_t mf = mf_lo; mf < mf_hi; ++mf)
    for (int pdch = plan.first_data_pdch(); pdch < plan.first_data_pdch() + plan.n_data_pdch();
         ++pdch)
      for (int b = 0; b < plan.blocks_per_multiframe(); ++b) {
        cal.cell_claimants(pdch, b, mf, cs);
        for (std::size_t i = 0; i < cs.size(); ++i)
          for (std::size_t j = i + 1; j < cs.size(); ++j)
            if (cs[i].usf == cs[j].usf)
              return "duplicate USF " + std::to_string(cs[i].usf) + " in pdch " +
                     std::to_string(pdch) + " block " + std::to_string(b) + " mf " +
                     std::to_string(mf);
      }
  return {};
}

}  // namespace gsmsim::testing
