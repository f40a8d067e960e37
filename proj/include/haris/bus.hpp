#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace haris {

/// Topic names: non-empty, [a-z0-9_/]+.
inline bool valid_topic(std::string_view t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '/')) return false;
  return true;
}

inline std::vector<std::string_view> split_levels(std::string_view t) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == '/') {
      out.push_back(t.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

/// Patterns are topics in which whole levels may be "+".
inline bool valid_pattern(std::string_view p) {
  if (p.empty()) return false;
  for (auto level : split_levels(p)) {
    if (level == "+") continue;
    for (char c : level)
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

inline bool topic_matches(std::string_view pattern, std::string_view topic) {
  const auto p = split_levels(pattern);
  const auto t = split_levels(topic);
  if (p.size() != t.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != "+" && p[i] != t[i]) return false;
  return true;
}

class BusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RequestTimeout : public BusError {
 public:
  using BusError::BusError;
};

template <class Payload>
struct BasicEnvelope {
  std::string topic;
  std::uint64_t seq = 0;
  std::int64_t timestamp = 0;  // ms
  Payload payload;
  std::string reply_to;
  std::uint64_t correlation_id = 0;
};

/// In-process publish/subscribe with bounded, oldest-dropping subscriber
/// queues. publish never blocks on a consumer.
template <class Payload>
class BasicBus {
 public:
  using Envelope = BasicEnvelope<Payload>;
  using Clock = std::function<std::int64_t()>;

  struct TopicCounters {
    std::uint64_t received = 0;  // matched and enqueued
    std::uint64_t dropped = 0;
    std::uint64_t delivered = 0;  // popped by the consumer
  };

  class Subscription {
   public:
    Subscription(std::string pattern, std::size_t capacity) : pattern_(std::move(pattern)), capacity_(capacity) {}

    const std::string& pattern() const { return pattern_; }
    std::size_t capacity() const { return capacity_; }

    std::optional<Envelope> try_pop() {
      std::lock_guard lock(mu_);
      return pop_locked();
    }

    /// Waits up to `timeout` for the next envelope.
    std::optional<Envelope> pop_for(std::chrono::milliseconds timeout) {
      std::unique_lock lock(mu_);
      cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
      return pop_locked();
    }

    std::vector<Envelope> drain() {
      std::lock_guard lock(mu_);
      std::vector<Envelope> out;
      while (auto e = pop_locked()) out.push_back(std::move(*e));
      return out;
    }

    std::size_t size() const {
      std::lock_guard lock(mu_);
      return queue_.size();
    }

    std::uint64_t dropped() const {
      std::lock_guard lock(mu_);
      std::uint64_t n = 0;
      for (const auto& [_, c] : counters_) n += c.dropped;
      return n;
    }

    std::map<std::string, TopicCounters> counters() const {
      std::lock_guard lock(mu_);
      return counters_;
    }

    /// Wakes blocked consumers; no further envelopes are accepted.
    void close() {
      {
        std::lock_guard lock(mu_);
        closed_ = true;
      }
      cv_.notify_all();
    }

    bool closed() const {
      std::lock_guard lock(mu_);
      return closed_;
    }

    void push(const Envelope& e) {
      {
        std::lock_guard lock(mu_);
        if (closed_) return;
        auto& c = counters_[e.topic];
        ++c.received;
        if (queue_.size() >= capacity_) {
          ++counters_[queue_.front().topic].dropped;
          queue_.pop_front();
        }
        queue_.push_back(e);
      }
      cv_.notify_one();
    }

   private:
    std::optional<Envelope> pop_locked() {
      if (queue_.empty()) return std::nullopt;
      Envelope e = std::move(queue_.front());
      queue_.pop_front();
      ++counters_[e.topic].delivered;
      return e;
    }

    std::string pattern_;
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Envelope> queue_;
    std::map<std::string, TopicCounters> counters_;
    bool closed_ = false;
  };

  using SubscriptionPtr = std::shared_ptr<Subscription>;

  explicit BasicBus(std::size_t default_capacity = 1024, Clock clock = {})
      : default_capacity_(default_capacity), clock_(clock ? std::move(clock) : Clock(&wall_clock_ms)) {}

  static std::int64_t wall_clock_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

  void set_clock(Clock clock) {
    std::lock_guard lock(mu_);
    clock_ = std::move(clock);
  }

  /// Stamps and delivers; returns the topic's sequence number.
  std::uint64_t publish(const std::string& topic, Payload payload, std::string reply_to = {},
                        std::uint64_t correlation_id = 0) {
    if (!valid_topic(topic)) throw BusError("invalid topic '" + topic + "'");
    std::lock_guard lock(mu_);
    Envelope e{topic, ++seq_[topic], clock_(), std::move(payload), std::move(reply_to), correlation_id};
    std::erase_if(subs_, [](const SubscriptionPtr& s) { return s.use_count() == 1 || s->closed(); });
    for (const auto& s : subs_)
      if (topic_matches(s->pattern(), topic)) s->push(e);
    return e.seq;
  }

  /// Receives envelopes published after this call. capacity 0 = bus default.
  SubscriptionPtr subscribe(const std::string& pattern, std::size_t capacity = 0) {
    if (!valid_pattern(pattern)) throw BusError("invalid pattern '" + pattern + "'");
    auto s = std::make_shared<Subscription>(pattern, capacity ? capacity : default_capacity_);
    std::lock_guard lock(mu_);
    subs_.push_back(s);
    return s;
  }

  void unsubscribe(const SubscriptionPtr& s) {
    if (!s) return;
    s->close();
    std::lock_guard lock(mu_);
    std::erase(subs_, s);
  }

  /// Last sequence number issued on a topic (0 if none).
  std::uint64_t last_seq(const std::string& topic) const {
    std::lock_guard lock(mu_);
    const auto it = seq_.find(topic);
    return it == seq_.end() ? 0 : it->second;
  }

  /// Publishes to `service_topic` and waits for the correlated reply.
  Payload request(const std::string& service_topic, Payload payload, std::chrono::milliseconds timeout) {
    const std::uint64_t id = ++next_correlation_;
    const std::string reply_topic = "reply/" + std::to_string(id);
    auto sub = subscribe(reply_topic, 4);
    publish(service_topic, std::move(payload), reply_topic, id);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) break;
      auto e = sub->pop_for(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now) +
                            std::chrono::milliseconds(1));
      if (e && e->correlation_id == id) {
        unsubscribe(sub);
        return std::move(e->payload);
      }
    }
    unsubscribe(sub);
    throw RequestTimeout("no reply on '" + service_topic + "' within " + std::to_string(timeout.count()) + " ms");
  }

  /// Answers a request envelope.
  std::uint64_t reply(const Envelope& request, Payload payload) {
    if (request.reply_to.empty()) throw BusError("envelope on '" + request.topic + "' has no reply_to");
    return publish(request.reply_to, std::move(payload), {}, request.correlation_id);
  }

 private:
  std::size_t default_capacity_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::uint64_t> seq_;
  std::vector<SubscriptionPtr> subs_;
  std::atomic<std::uint64_t> next_correlation_{0};
};

}  // namespace haris
