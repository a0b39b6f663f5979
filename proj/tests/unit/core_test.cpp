#include <gtest/gtest.h>

#include "creek/core/dot_set.hpp"
#include "creek/core/request.hpp"

namespace creek {
namespace {

TEST(DotSet, PrefixCompressionAndSparseMembers) {
  DotSet s;
  s.insert({1, 1});
  s.insert({1, 2});
  s.insert({1, 5});
  EXPECT_TRUE(s.contains({1, 2}));
  EXPECT_FALSE(s.contains({1, 3}));
  EXPECT_TRUE(s.contains({1, 5}));
  EXPECT_EQ(s.prefix(1), 2u);
  s.insert({1, 3});
  s.insert({1, 4});
  EXPECT_EQ(s.prefix(1), 5u);
  EXPECT_EQ(s.encoded_entries(), 1u);
  EXPECT_EQ(s.size(), 5u);
}

TEST(DotSet, EventZeroIsNeverAMember) {
  DotSet s;
  s.insert({1, 0});
  EXPECT_TRUE(s.empty());
  EXPECT_FALSE(s.contains({1, 0}));
}

TEST(DotSet, EraseSplitsThePrefix) {
  DotSet s;
  for (std::uint64_t e = 1; e <= 4; ++e) s.insert({2, e});
  s.erase({2, 2});
  EXPECT_EQ(s.prefix(2), 1u);
  EXPECT_FALSE(s.contains({2, 2}));
  EXPECT_TRUE(s.contains({2, 3}));
  EXPECT_TRUE(s.contains({2, 4}));
  s.erase({2, 1});
  s.erase({2, 3});
  s.erase({2, 4});
  EXPECT_TRUE(s.empty());
}

TEST(DotSet, MergeAndInclusion) {
  DotSet a, b;
  a.insert({1, 1});
  a.insert({2, 3});
  b.insert({1, 1});
  b.insert({1, 2});
  b.insert({3, 1});
  EXPECT_FALSE(a.includes(b));
  a.merge(b);
  EXPECT_TRUE(a.includes(b));
  EXPECT_TRUE(a.contains({2, 3}));
  EXPECT_EQ(a.prefix(1), 2u);
  DotSet sparse;
  sparse.insert({1, 2});
  DotSet wide;
  wide.insert({1, 1});
  wide.insert({1, 2});
  EXPECT_TRUE(wide.includes(sparse));
  EXPECT_FALSE(sparse.includes(wide));
}

TEST(DotSet, InclusionAcrossPrefixAndExtras) {
  DotSet small, big;
  for (std::uint64_t e = 1; e <= 3; ++e) small.insert({1, e});
  big.insert({1, 1});
  big.insert({1, 2});
  big.insert({1, 3});
  big.insert({1, 7});
  EXPECT_TRUE(big.includes(small));
  DotSet holes;
  holes.insert({1, 1});
  holes.insert({1, 3});
  EXPECT_FALSE(holes.includes(small));
}

TEST(DotSet, RandomizedAgainstStdSet) {
  std::set<Dot> model;
  DotSet s;
  std::uint64_t x = 12345;
  for (int i = 0; i < 5000; ++i) {
    x = x * 6364136223846793005ULL + 1442695040888963407ULL;
    const Dot d{static_cast<ReplicaId>(1 + (x >> 60) % 3), 1 + (x >> 33) % 40};
    if ((x >> 20) % 4 == 0) {
      s.erase(d);
      model.erase(d);
    } else {
      s.insert(d);
      model.insert(d);
    }
  }
  const auto v = s.to_vector();
  EXPECT_EQ(std::set<Dot>(v.begin(), v.end()), model);
  EXPECT_EQ(s.size(), model.size());
}

TEST(Request, TotalOrderByTimestampThenId) {
  Request a, b, c;
  a.timestamp = 5;
  a.id = {2, 1};
  b.timestamp = 5;
  b.id = {3, 1};
  c.timestamp = 4;
  c.id = {9, 9};
  EXPECT_TRUE(precedes(a, b));
  EXPECT_FALSE(precedes(b, a));
  EXPECT_TRUE(precedes(c, a));
  EXPECT_FALSE(precedes(a, a));
}

TEST(RequestPool, StableAddressesAndLookup) {
  RequestPool pool;
  std::vector<const Request*> ptrs;
  for (std::uint64_t i = 1; i <= 1000; ++i) {
    Request r;
    r.id = {1, i};
    ptrs.push_back(pool.add(r));
  }
  EXPECT_EQ(pool.find({1, 1}), ptrs.front());
  EXPECT_EQ(pool.find({1, 1000}), ptrs.back());
  EXPECT_EQ(pool.find({2, 1}), nullptr);
  EXPECT_EQ(ptrs.front()->id, (Dot{1, 1}));
}

}  // namespace
}  // namespace creek
