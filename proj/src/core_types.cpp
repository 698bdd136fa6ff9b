#include "itema2c/core_types.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace itema2c {

RecList::RecList(std::vector<ItemId> items) : items_(std::move(items)) {
  std::unordered_set<std::int32_t> seen;
  seen.reserve(items_.size());
  for (const auto& item : items_) {
    if (item.index < 0) {
      throw std::invalid_argument("negative item id in recommendation list");
    }
    if (!seen.insert(item.index).second) {
      throw std::invalid_argument("duplicate item " + std::to_string(item.index) + " in recommendation list");
    }
  }
}

RecList RecList::checked(std::vector<ItemId> items, std::size_t catalog_size) {
  for (const auto& item : items) {
    if (!is_valid(item, catalog_size)) {
      throw std::invalid_argument("item id " + std::to_string(item.index) + " outside catalog of size " +
                                  std::to_string(catalog_size));
    }
  }
  return RecList(std::move(items));
}

double Feedback::total() const { return std::accumulate(rewards.begin(), rewards.end(), 0.0); }

Feedback make_feedback(std::span<const std::uint8_t> clicks, double reward_click, double reward_miss) {
  Feedback fb;
  fb.clicks.assign(clicks.begin(), clicks.end());
  fb.rewards.reserve(clicks.size());
  for (auto c : clicks) fb.rewards.push_back(c ? reward_click : reward_miss);
  return fb;
}

void validate(const Transition& t) {
  const auto k = t.action.size();
  if (k == 0) throw std::invalid_argument("transition has an empty list");
  if (t.feedback.clicks.size() != k || t.feedback.rewards.size() != k) {
    throw std::invalid_argument("transition list of size " + std::to_string(k) + " has " +
                                std::to_string(t.feedback.clicks.size()) + " clicks and " +
                                std::to_string(t.feedback.rewards.size()) + " rewards");
  }
  if (!t.obs || !t.next_obs) throw std::invalid_argument("transition is missing an observation");
}

bool equivalent(const Transition& a, const Transition& b) {
  auto same_obs = [](const ObservationPtr& x, const ObservationPtr& y) {
    if (!x || !y) return !x && !y;
    return *x == *y;
  };
  if (!same_obs(a.obs, b.obs) || !same_obs(a.next_obs, b.next_obs)) return false;
  if (a.action != b.action || a.done != b.done) return false;
  if (a.feedback.clicks != b.feedback.clicks) return false;
  auto bits_equal = [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i])) return false;
    }
    return true;
  };
  return bits_equal(a.feedback.rewards, b.feedback.rewards) && bits_equal(a.hyper_action, b.hyper_action);
}

namespace {

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_observation(const Observation& o) {
    put<std::int64_t>(o.user_id);
    put<std::uint32_t>(static_cast<std::uint32_t>(o.history.size()));
    for (const auto& h : o.history) {
      put<std::int32_t>(h.item.index);
      put<std::uint8_t>(h.clicked ? 1 : 0);
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > in_.size()) throw std::invalid_argument("truncated transition record");
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  Observation get_observation() {
    Observation o;
    o.user_id = get<std::int64_t>();
    const auto n = get<std::uint32_t>();
    o.history.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      HistoryEntry h;
      h.item.index = get<std::int32_t>();
      h.clicked = get<std::uint8_t>() != 0;
      o.history.push_back(h);
    }
    return o;
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t kTransitionMagic = 0x49413243;  // "IA2C"

}  // namespace

std::string serialize(const Transition& t) {
  validate(t);
  Writer w;
  w.put<std::uint32_t>(kTransitionMagic);
  w.put_observation(*t.obs);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.action.size()));
  for (std::size_t k = 0; k < t.action.size(); ++k) {
    w.put<std::int32_t>(t.action[k].index);
    w.put<std::uint8_t>(t.feedback.clicks[k]);
    w.put<double>(t.feedback.rewards[k]);
  }
  w.put_observation(*t.next_obs);
  w.put<std::uint8_t>(t.done ? 1 : 0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.hyper_action.size()));
  for (double x : t.hyper_action) w.put<double>(x);
  return w.take();
}

Transition deserialize_transition(std::string_view bytes) {
  Reader r(bytes);
  if (r.get<std::uint32_t>() != kTransitionMagic) throw std::invalid_argument("not a transition record");
  Transition t;
  t.obs = std::make_shared<const Observation>(r.get_observation());
  const auto k = r.get<std::uint32_t>();
  std::vector<ItemId> items;
  for (std::uint32_t i = 0; i < k; ++i) {
    items.push_back(ItemId{r.get<std::int32_t>()});
    t.feedback.clicks.push_back(r.get<std::uint8_t>());
    t.feedback.rewards.push_back(r.get<double>());
  }
  t.action = RecList(std::move(items));
  t.next_obs = std::make_shared<const Observation>(r.get_observation());
  t.done = r.get<std::uint8_t>() != 0;
  const auto h = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < h; ++i) t.hyper_action.push_back(r.get<double>());
  if (!r.at_end()) throw std::invalid_argument("trailing bytes after transition record");
  validate(t);
  return t;
}

std::string to_log_line(const Transition& t) {
  validate(t);
  std::ostringstream os;
  os << t.obs->user_id;
  for (const auto& item : t.action) os << ' ' << item.index;
  for (auto c : t.feedback.clicks) os << ' ' << (c ? 1 : 0);
  os << ' ' << (t.done ? 1 : 0);
  return os.str();
}

TransitionLogRecord parse_log_line(std::string_view line) {
  std::vector<std::int64_t> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v);
    if (ec != std::errc{}) throw std::invalid_argument("bad field in transition log line");
    fields.push_back(v);
    pos = static_cast<std::size_t>(end - line.data());
  }
  if (fields.size() < 4 || fields.size() % 2 != 0) {
    throw std::invalid_argument("transition log line has " + std::to_string(fields.size()) + " fields");
  }
  const std::size_t k = (fields.size() - 2) / 2;
  TransitionLogRecord rec;
  rec.user_id = fields[0];
  for (std::size_t i = 0; i < k; ++i) rec.items.push_back(ItemId{static_cast<std::int32_t>(fields[1 + i])});
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = fields[1 + k + i];
    if (c != 0 && c != 1) throw std::invalid_argument("click bit must be 0 or 1");
    rec.clicks.push_back(static_cast<std::uint8_t>(c));
  }
  const auto d = fields.back();
  if (d != 0 && d != 1) throw std::invalid_argument("done flag must be 0 or 1");
  rec.done = d == 1;
  return rec;
}

}  // namespace itema2c
