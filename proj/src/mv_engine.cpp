#include "creek/engine/mv_engine.hpp"

#include <algorithm>
#include <sstream>

#include "creek/core/errors.hpp"

namespace creek::engine {

class MvEngine::Context final : public TxContext {
 public:
  Context(const MvEngine& engine, std::size_t pos, Attempt* attempt) : engine_(engine), pos_(pos), attempt_(attempt) {}

  Value read(ObjectKey key) override {
    if (auto it = own_.find(key); it != own_.end()) return it->second;
    if (auto it = seen_.find(key); it != seen_.end()) return it->second;
    const Resolved r = engine_.resolve(key, pos_);
    seen_.emplace(key, r.value);
    if (attempt_) attempt_->reads.emplace_back(key, r.uid);
    return r.value;
  }

  void write(ObjectKey key, Value value) override {
    auto [it, fresh] = own_.insert_or_assign(key, value);
    if (fresh) order_.push_back(key);
  }

  void finish() {
    if (!attempt_) return;
    attempt_->writes.reserve(order_.size());
    for (ObjectKey k : order_) attempt_->writes.emplace_back(k, own_.at(k));
  }

 private:
  const MvEngine& engine_;
  std::size_t pos_;
  Attempt* attempt_;
  std::unordered_map<ObjectKey, Value> own_;
  std::unordered_map<ObjectKey, Value> seen_;
  std::vector<ObjectKey> order_;
};

std::optional<std::size_t> MvEngine::position(const Request* r) const {
  auto it = pos_.find(r);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

MvEngine::Resolved MvEngine::resolve(ObjectKey key, std::size_t pos) const {
  if (auto c = chains_.find(key); c != chains_.end()) {
    const Version* best = nullptr;
    std::size_t best_pos = 0;
    for (const Version& v : c->second) {
      if (v.invalid) continue;
      auto p = pos_.find(v.creator);
      if (p == pos_.end() || p->second >= pos) continue;
      if (!best || p->second > best_pos) {
        best = &v;
        best_pos = p->second;
      }
    }
    if (best) return {best->uid, best->value};
  }
  if (auto it = committed_.find(key); it != committed_.end()) return {it->second.first, it->second.second};
  if (auto it = base_.find(key); it != base_.end()) return {0, it->second};
  return {0, 0};
}

bool MvEngine::still_valid(const Installed& inst, std::size_t pos) const {
  for (const auto& [key, uid] : inst.reads)
    if (resolve(key, pos).uid != uid) return false;
  return true;
}

void MvEngine::mark_invalid(const Request* r, Installed& inst) {
  for (const auto& [key, value] : inst.writes) {
    for (Version& v : chains_.at(key)) {
      if (v.uid == inst.uid && !v.invalid) {
        v.invalid = true;
        ++invalid_count_;
      }
    }
  }
  installed_.erase(r);
}

void MvEngine::revalidate(std::size_t start, std::unordered_set<ObjectKey> dirty,
                          std::vector<const Request*>* invalidated) {
  for (std::size_t i = start; i < order_.size() && !dirty.empty(); ++i) {
    const Request* r = order_[i];
    auto it = installed_.find(r);
    if (it == installed_.end()) continue;
    Installed& inst = it->second;
    bool touches = false;
    if (dirty.size() < inst.reads.size()) {
      for (ObjectKey k : dirty)
        if (inst.reads.count(k)) {
          touches = true;
          break;
        }
    } else {
      for (const auto& kv : inst.reads)
        if (dirty.count(kv.first)) {
          touches = true;
          break;
        }
    }
    if (!touches || still_valid(inst, i)) continue;
    for (const auto& kv : inst.writes) dirty.insert(kv.first);
    mark_invalid(r, inst);
    if (invalidated) invalidated->push_back(r);
  }
}

std::size_t MvEngine::set_order(const std::vector<const Request*>& order, std::vector<const Request*>* invalidated) {
  std::size_t lcp = 0;
  const std::size_t common = std::min(order_.size(), order.size());
  while (lcp < common && order_[lcp] == order[lcp]) ++lcp;
  if (lcp == order_.size() && lcp == order.size()) return lcp;

  std::unordered_set<const Request*> kept(order.begin() + static_cast<std::ptrdiff_t>(lcp), order.end());
  std::unordered_set<ObjectKey> dirty;
  for (std::size_t i = lcp; i < order_.size(); ++i) {
    const Request* r = order_[i];
    if (folded_.count(r)) throw ProtocolViolation("reorder moved a folded (committed) request");
    auto it = installed_.find(r);
    if (it != installed_.end()) {
      for (const auto& kv : it->second.writes) dirty.insert(kv.first);
      if (!kept.count(r)) {
        mark_invalid(r, it->second);
        if (invalidated) invalidated->push_back(r);
      }
    }
    if (!kept.count(r)) pos_.erase(r);
  }
  order_ = order;
  for (std::size_t i = lcp; i < order_.size(); ++i) pos_[order_[i]] = i;
  revalidate(lcp, std::move(dirty), invalidated);
  return lcp;
}

MvEngine::Attempt MvEngine::execute(const Request* r) {
  auto pos = position(r);
  if (!pos) throw ProtocolViolation("execute of a request outside the order");
  Attempt a;
  a.req = r;
  Context ctx(*this, *pos, &a);
  a.response = r->op.run(ctx);
  ctx.finish();
  for (const auto& kv : a.reads) ++refs_[kv.second];
  return a;
}

Response MvEngine::execute_at(const workload::TxProgram& op, std::size_t pos) const {
  Context ctx(*this, pos, nullptr);
  return op.run(ctx);
}

void MvEngine::release(const Attempt& a) {
  for (const auto& kv : a.reads) {
    auto it = refs_.find(kv.second);
    if (it != refs_.end() && --it->second == 0) refs_.erase(it);
  }
}

bool MvEngine::validate(const Attempt& a) const {
  auto pos = position(a.req);
  if (!pos || installed(a.req)) return false;
  for (const auto& [key, uid] : a.reads)
    if (resolve(key, *pos).uid != uid) return false;
  return true;
}

void MvEngine::install(const Attempt& a, std::vector<const Request*>* invalidated) {
  auto pos = position(a.req);
  if (!pos) throw ProtocolViolation("install of a request outside the order");
  const Uid uid = next_uid_++;
  Installed inst;
  inst.uid = uid;
  inst.reads.insert(a.reads.begin(), a.reads.end());
  inst.writes = a.writes;
  inst.response = a.response;
  std::unordered_set<ObjectKey> dirty;
  for (const auto& [key, value] : a.writes) {
    chains_[key].push_back(Version{uid, a.req, value, false});
    dirty.insert(key);
  }
  installed_.emplace(a.req, std::move(inst));
  revalidate(*pos + 1, std::move(dirty), invalidated);
}

std::vector<const Request*> MvEngine::invalidate(const Request* r) {
  std::vector<const Request*> affected;
  auto it = installed_.find(r);
  if (it == installed_.end()) return affected;
  const std::size_t pos = pos_.at(r);
  std::unordered_set<ObjectKey> written;
  for (const auto& kv : it->second.writes) written.insert(kv.first);
  for (std::size_t i = pos + 1; i < order_.size() && !written.empty(); ++i) {
    auto other = installed_.find(order_[i]);
    if (other == installed_.end()) continue;
    for (const auto& kv : other->second.reads) {
      if (written.count(kv.first)) {
        affected.push_back(order_[i]);
        break;
      }
    }
  }
  mark_invalid(r, it->second);
  return affected;
}

bool MvEngine::installed(const Request* r) const { return installed_.count(r) > 0 || folded_.count(r) > 0; }

const Response* MvEngine::response(const Request* r) const {
  if (auto it = installed_.find(r); it != installed_.end()) return &it->second.response;
  if (auto it = folded_.find(r); it != folded_.end()) return &it->second;
  return nullptr;
}

void MvEngine::fold(const Request* r) {
  auto it = installed_.find(r);
  if (it == installed_.end()) {
    std::ostringstream os;
    os << "fold of request " << r->id << " that is not installed";
    throw ProtocolViolation(os.str());
  }
  const Uid uid = it->second.uid;
  for (const auto& [key, value] : it->second.writes) {
    auto& chain = chains_.at(key);
    chain.erase(std::remove_if(chain.begin(), chain.end(), [uid](const Version& v) { return v.uid == uid; }),
                chain.end());
    if (chain.empty()) chains_.erase(key);
    auto [c, fresh] = committed_.insert_or_assign(key, std::make_pair(uid, value));
    if (!fresh) ++superseded_;
  }
  folded_.emplace(r, std::move(it->second.response));
  installed_.erase(it);
}

std::size_t MvEngine::gc() {
  std::size_t reclaimed = superseded_;
  superseded_ = 0;
  if (invalid_count_ == 0) return reclaimed;
  for (auto c = chains_.begin(); c != chains_.end();) {
    auto& chain = c->second;
    const auto before = chain.size();
    chain.erase(std::remove_if(chain.begin(), chain.end(),
                               [this](const Version& v) { return v.invalid && refs_.count(v.uid) == 0; }),
                chain.end());
    const auto removed = before - chain.size();
    reclaimed += removed;
    invalid_count_ -= removed;
    c = chain.empty() ? chains_.erase(c) : std::next(c);
  }
  return reclaimed;
}

std::size_t MvEngine::chain_length(ObjectKey key) const {
  std::size_t n = committed_.count(key);
  if (auto c = chains_.find(key); c != chains_.end()) n += c->second.size();
  return n;
}

StoreDump MvEngine::dump(std::size_t prefix_len) const {
  StoreDump d;
  for (const auto& [key, v] : committed_) dump_put(d, base_, key, v.second);
  for (std::size_t i = 0; i < prefix_len && i < order_.size(); ++i) {
    auto it = installed_.find(order_[i]);
    if (it == installed_.end()) continue;
    for (const auto& [key, value] : it->second.writes) dump_put(d, base_, key, value);
  }
  return d;
}

}  // namespace creek::engine
