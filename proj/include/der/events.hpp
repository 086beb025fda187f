#ifndef DER_EVENTS_HPP_
#define DER_EVENTS_HPP_

#include <mutex>
#include <vector>

namespace der {

/// Training ledger used by conformance tests: which structural actions
/// happened and when.
struct Event {
    enum class Type { InsertMain, PoolAdd, ZoneRefresh, TargetCopy };
    Type type;
    long step;    // trainer step for trainer events, episode index for worker events
    int buffer;   // buffer id, -1 when not applicable
    long count;   // transitions for inserts, otherwise 0
};

class EventLog {
  public:
    void add(Event e) {
        std::lock_guard lock(mu_);
        events_.push_back(e);
    }
    std::vector<Event> snapshot() const {
        std::lock_guard lock(mu_);
        return events_;
    }

  private:
    std::vector<Event> events_;
    mutable std::mutex mu_;
};

}  // namespace der

#endif  // DER_EVENTS_HPP_
