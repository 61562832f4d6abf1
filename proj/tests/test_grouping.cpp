#include <doctest.h>

#include <random>

#include "cosched/grouping.hpp"

using namespace cosched;

namespace {

RawLayer layer(std::set<int> support, bool fusible = false, bool reformat = false,
               bool transition_ok = true) {
  RawLayer l;
  l.supported_accelerators = std::move(support);
  l.fusible_with_next = fusible;
  l.reformat_on_exit = reformat;
  l.transition_allowed_after = transition_ok;
  return l;
}

}  // namespace

TEST_CASE("permissive flags keep every layer its own group") {
  std::vector<RawLayer> layers = {layer({0, 1}), layer({0, 1}), layer({0, 1})};
  auto groups = group_layers(layers);
  REQUIRE(groups.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(groups[std::size_t(i)].start_index == i);
    CHECK(groups[std::size_t(i)].end_index == i + 1);
  }
}

TEST_CASE("fusible layer merges with its successor") {
  std::vector<RawLayer> layers = {layer({0, 1}, true), layer({0, 1})};
  auto groups = group_layers(layers);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].start_index == 0);
  CHECK(groups[0].end_index == 2);
}

TEST_CASE("transition ban after an eltwise-style layer merges forward") {
  // A layer after which the runtime cannot switch accelerators is grouped
  // with whatever follows it.
  std::vector<RawLayer> layers = {layer({0, 1}, false, false, false), layer({0, 1})};
  auto groups = group_layers(layers);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].end_index == 2);
  CHECK(groups[0].supported_accelerators == std::set<int>{0, 1});
}

TEST_CASE("reformat on exit merges forward") {
  std::vector<RawLayer> layers = {layer({0}), layer({0}, false, true), layer({0})};
  auto groups = group_layers(layers);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].end_index == 1);
  CHECK(groups[1].start_index == 1);
  CHECK(groups[1].end_index == 3);
}

TEST_CASE("contradictory support sets in a forced merge raise EmptySupport") {
  std::vector<RawLayer> layers = {layer({0}, true), layer({1})};
  CHECK_THROWS_AS(group_layers(layers), EmptySupportError);
}

TEST_CASE("group support is the intersection of member supports") {
  std::vector<RawLayer> layers = {layer({0, 1, 2}, true), layer({0, 2}, true), layer({2})};
  auto groups = group_layers(layers);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].supported_accelerators == std::set<int>{2});
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(group_layers({}), DomainError);
}

TEST_CASE("randomized partition, boundary-flag and idempotence properties") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + int(rng() % 12);
    std::vector<RawLayer> layers;
    for (int i = 0; i < n; ++i) {
      RawLayer l = layer({0, int(rng() % 3)});  // accel 0 always present
      l.fusible_with_next = (i + 1 < n) && (rng() % 3 == 0);
      l.reformat_on_exit = rng() % 4 == 0;
      l.transition_allowed_after = rng() % 4 != 0;
      layers.push_back(std::move(l));
    }
    auto groups = group_layers(layers);

    // Partition: spans are contiguous, cover [0, n), in order.
    REQUIRE(!groups.empty());
    CHECK(groups.front().start_index == 0);
    CHECK(groups.back().end_index == n);
    for (std::size_t k = 1; k < groups.size(); ++k)
      CHECK(groups[k].start_index == groups[k - 1].end_index);

    // No boundary directly after a merge-forcing layer.
    for (std::size_t k = 0; k + 1 < groups.size(); ++k) {
      const RawLayer& last = layers[std::size_t(groups[k].end_index - 1)];
      CHECK(!last.fusible_with_next);
      CHECK(!last.reformat_on_exit);
      CHECK(last.transition_allowed_after);
    }

    // Idempotence: one permissive layer per produced group regroups to the
    // identity partition.
    std::vector<RawLayer> collapsed;
    for (const auto& g : groups) collapsed.push_back(layer(g.supported_accelerators));
    auto regrouped = group_layers(collapsed);
    REQUIRE(regrouped.size() == groups.size());
    for (std::size_t k = 0; k < regrouped.size(); ++k) {
      CHECK(regrouped[k].start_index == int(k));
      CHECK(regrouped[k].end_index == int(k) + 1);
      CHECK(regrouped[k].supported_accelerators == groups[k].supported_accelerators);
    }
  }
}
