#include "gnnerator/pipeline.hpp"

#include <algorithm>

#include "gnnerator/errors.hpp"

namespace gnnerator {

StagePipeline::StagePipeline(DramModel& dram, Scratchpad& scratchpad, StepSource& source)
    : dram_(dram), scratchpad_(scratchpad), source_(source) {}

bool StagePipeline::issue(Slot& slot, const std::vector<Transfer>& transfers, bool is_write) {
  for (const Transfer& t : transfers) {
    if (t.bytes == 0) continue;
    slot.outstanding.push_back(dram_.request(t.who, t.bytes, is_write, t.stream));
  }
  return !slot.outstanding.empty();
}

bool StagePipeline::advance(Cycle now) {
  bool changed = false;
  for (bool progress = true; progress;) {
    progress = false;

    for (Slot& slot : slots_) {
      if (slot.phase == Phase::Computing && slot.timing.compute_done <= now) {
        last_compute_end_ = slot.timing.compute_done;
        slot.phase = issue(slot, slot.step.writes, true) ? Phase::Writing : Phase::Retired;
        if (slot.phase == Phase::Retired) slot.timing.retired = now;
        progress = true;
      }
    }

    while (!slots_.empty() && slots_.front().phase == Phase::Retired) {
      Slot slot = std::move(slots_.front());
      slots_.pop_front();
      source_.on_retire(slot.step, slot.timing);
      progress = true;
    }

    const bool busy = std::any_of(slots_.begin(), slots_.end(),
                                  [](const Slot& s) { return s.phase == Phase::Computing; });
    if (!busy) {
      auto next = std::find_if(slots_.begin(), slots_.end(), [](const Slot& s) {
        return s.phase == Phase::Fetching || s.phase == Phase::Fetched;
      });
      if (next != slots_.end() && next->phase == Phase::Fetched) {
        scratchpad_.swap_banks();
        next->phase = Phase::Computing;
        next->timing.compute_start = now;
        next->timing.compute_cycles = source_.compute(next->step, now);
        next->timing.compute_done = now + next->timing.compute_cycles;
        progress = true;
      }
    }

    const bool fetching = std::any_of(slots_.begin(), slots_.end(),
                                      [](const Slot& s) { return s.phase == Phase::Fetching; });
    if (!exhausted_ && !fetching && slots_.size() < 2) {
      PipelineStep step;
      switch (source_.poll(now, step)) {
        case StepSource::Poll::Ready: {
          blocked_ = false;
          scratchpad_.begin_fill(step.fill_bytes);
          Slot& slot = slots_.emplace_back();
          slot.step = std::move(step);
          slot.timing.fetch_start = now;
          source_.on_fetch_start(slot.step, now);
          if (!issue(slot, slot.step.reads, false)) {
            scratchpad_.complete_fill();
            slot.phase = Phase::Fetched;
            slot.timing.fetch_done = now;
          }
          progress = true;
          break;
        }
        case StepSource::Poll::Blocked:
          blocked_ = true;
          break;
        case StepSource::Poll::Exhausted:
          blocked_ = false;
          exhausted_ = true;
          progress = true;
          break;
      }
    }
    changed |= progress;
  }
  return changed;
}

void StagePipeline::on_complete(TxnId id) {
  for (Slot& slot : slots_) {
    auto it = std::find(slot.outstanding.begin(), slot.outstanding.end(), id);
    if (it == slot.outstanding.end()) continue;
    slot.outstanding.erase(it);
    if (!slot.outstanding.empty()) return;
    if (slot.phase == Phase::Fetching) {
      scratchpad_.complete_fill();
      slot.phase = Phase::Fetched;
      slot.timing.fetch_done = dram_.now();
    } else if (slot.phase == Phase::Writing) {
      slot.phase = Phase::Retired;
      slot.timing.retired = dram_.now();
    } else {
      throw ProtocolError("DRAM completion for a step that is not transferring");
    }
    return;
  }
}

bool StagePipeline::computing(Cycle now) const {
  return std::any_of(slots_.begin(), slots_.end(), [now](const Slot& s) {
    return s.phase == Phase::Computing && s.timing.compute_done > now;
  });
}

std::optional<Cycle> StagePipeline::next_compute_end(Cycle now) const {
  std::optional<Cycle> best;
  for (const Slot& s : slots_) {
    if (s.phase == Phase::Computing && s.timing.compute_done > now) {
      best = best ? std::min(*best, s.timing.compute_done) : s.timing.compute_done;
    }
  }
  return best;
}

void StagePipeline::account(Cycle now, Cycle cycles) {
  if (cycles == 0) return;
  if (done()) {
    counters_.idle += cycles;
    return;
  }
  if (computing(now)) {
    counters_.busy += cycles;
    return;
  }
  counters_.stall += cycles;
  const bool loading = std::any_of(slots_.begin(), slots_.end(), [](const Slot& s) {
    return s.phase == Phase::Fetching || s.phase == Phase::Fetched;
  });
  if (blocked_ && !loading) counters_.dependency_stall += cycles;
}

}  // namespace gnnerator
