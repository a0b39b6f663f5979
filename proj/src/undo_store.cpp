#include "creek/engine/undo_store.hpp"

#include <algorithm>
#include <sstream>

#include "creek/core/errors.hpp"

namespace creek::engine {

class UndoStore::Context final : public TxContext {
 public:
  Context(UndoStore& store, std::unordered_map<ObjectKey, Prior>& undo, AccessSets* sets)
      : store_(store), undo_(undo), sets_(sets) {}

  Value read(ObjectKey key) override {
    if (sets_ && std::find(sets_->reads.begin(), sets_->reads.end(), key) == sets_->reads.end())
      sets_->reads.push_back(key);
    return store_.get(key);
  }

  void write(ObjectKey key, Value value) override {
    if (!undo_.count(key)) {
      auto it = store_.overlay_.find(key);
      undo_.emplace(key, it == store_.overlay_.end() ? Prior{false, 0} : Prior{true, it->second});
      if (sets_) sets_->writes.push_back(key);
    }
    store_.overlay_[key] = value;
  }

 private:
  UndoStore& store_;
  std::unordered_map<ObjectKey, Prior>& undo_;
  AccessSets* sets_;
};

Response UndoStore::execute(const Request& r, AccessSets* sets) {
  auto [it, fresh] = undo_.try_emplace(r.id);
  if (!fresh) {
    std::ostringstream os;
    os << "request " << r.id << " executed twice without rollback";
    throw ProtocolViolation(os.str());
  }
  Context ctx(*this, it->second, sets);
  return r.op.run(ctx);
}

void UndoStore::rollback(const Dot& id) {
  auto it = undo_.find(id);
  if (it == undo_.end()) {
    std::ostringstream os;
    os << "rollback of " << id << " without an undo record";
    throw ProtocolViolation(os.str());
  }
  for (const auto& [key, prior] : it->second) {
    if (prior.present)
      overlay_[key] = prior.value;
    else
      overlay_.erase(key);
  }
  undo_.erase(it);
}

Value UndoStore::get(ObjectKey key) const {
  if (auto it = overlay_.find(key); it != overlay_.end()) return it->second;
  if (auto it = base_.find(key); it != base_.end()) return it->second;
  return 0;
}

StoreDump UndoStore::dump() const {
  StoreDump d;
  for (const auto& [k, v] : overlay_) dump_put(d, base_, k, v);
  return d;
}

}  // namespace creek::engine
