#include <doctest.h>

#include "stagroute/io.hpp"
#include "test_helpers.hpp"

using namespace stagroute;
using namespace stagroute::testing;

TEST_CASE("single trip on a two-node network") {
  const Network net = make_one_arc(300.0, 1500.0);
  GenParams params;
  params.n_trips = 1;
  params.seed = 3;
  params.sigma_fraction = 0.1;
  const Instance inst = generate_synthetic(net, PiecewiseRecipe{}, params);
  REQUIRE(inst.trip_count() == 1);
  const Trip& t = inst.trips()[0];
  REQUIRE(t.routes.routes.size() == 1);
  CHECK(t.routes.routes[0].arcs == std::vector<ArcId>{0});
  // sigma policy: 10% of the 300 s nominal route time.
  CHECK(t.max_stagger_s == doctest::Approx(30.0));
  // deadline policy: 125% of free flow.
  CHECK(t.latest_arrival_s == doctest::Approx(t.earliest_departure_s + 375.0));
}

TEST_CASE("generation is reproducible and stable under extension") {
  const Network net = make_grid(4, 4, 100.0, 5.0, 17, 60.0);
  GenParams params;
  params.n_trips = 12;
  params.seed = 99;
  const Instance a = generate_synthetic(net, PiecewiseRecipe{}, params);
  const Instance b = generate_synthetic(net, PiecewiseRecipe{}, params);
  CHECK(instance_to_json(a) == instance_to_json(b));

  params.n_trips = 16;
  const Instance c = generate_synthetic(net, PiecewiseRecipe{}, params);
  for (std::size_t i = 0; i < a.trip_count(); ++i) {
    CHECK(a.trips()[i].origin == c.trips()[i].origin);
    CHECK(a.trips()[i].dest == c.trips()[i].dest);
    CHECK(a.trips()[i].earliest_departure_s == c.trips()[i].earliest_departure_s);
  }
}

TEST_CASE("every generated trip satisfies the invariants") {
  const Network net = make_grid(5, 5, 100.0, 5.0, 31, 90.0);
  GenParams params;
  params.n_trips = 40;
  params.seed = 5;
  params.k = 3;
  const Instance inst = generate_synthetic(net, PolynomialDelay{}, params);
  for (const Trip& t : inst.trips()) {
    CHECK(t.max_stagger_s >= 0.0);
    CHECK(t.earliest_departure_s + t.routes.routes[0].free_flow_s <= t.latest_arrival_s + 1e-9);
    for (const Route& r : t.routes.routes) {
      CHECK(inst.network().arc(r.arcs.front()).tail == t.origin);
      CHECK(inst.network().arc(r.arcs.back()).head == t.dest);
    }
  }
}

TEST_CASE("save/load round trip is exact") {
  const Network net = make_grid(4, 4, 100.0, 5.0, 7, 45.0);
  GenParams params;
  params.n_trips = 10;
  params.seed = 123;
  const Instance inst = generate_synthetic(net, PolynomialDelay{0.1, 35.0, 3.0}, params);
  const std::string path = "/tmp/stagroute_test_instance.json";
  save_instance(inst, path);
  const Instance loaded = load_instance(path);
  CHECK(instance_to_json(inst) == instance_to_json(loaded));
}

TEST_CASE("hand-written fixture parses to the expected fields") {
  const std::string text = R"({
    "horizon_s": 600.0,
    "network": {
      "nodes": [0, 1, 2],
      "arcs": [
        {"id": 0, "tail": 0, "head": 1, "length_m": 100.0, "nominal_s": 20.0},
        {"id": 1, "tail": 1, "head": 2, "length_m": 150.0, "nominal_s": 30.0}
      ]
    },
    "delay": {"type": "polynomial", "alpha": 0.1, "beta": 35.0, "gamma": 3.0},
    "trips": [
      {"id": 0, "origin": 0, "dest": 2, "earliest_departure_s": 5.0,
       "latest_arrival_s": 120.0, "max_stagger_s": 12.5, "controlled": true,
       "routes": {"k_requested": 1, "theta": 0.6, "routes": [{"arcs": [0, 1]}]}},
      {"id": 1, "origin": 0, "dest": 1, "earliest_departure_s": 8.0,
       "latest_arrival_s": 60.0, "max_stagger_s": 0.0, "controlled": false,
       "routes": {"k_requested": 1, "theta": 0.6, "routes": [{"arcs": [0]}]}},
      {"id": 2, "origin": 1, "dest": 2, "earliest_departure_s": 0.0,
       "latest_arrival_s": 90.0, "max_stagger_s": 4.0, "controlled": true,
       "routes": {"k_requested": 1, "theta": 0.6, "routes": [{"arcs": [1]}]}}
    ]
  })";
  const std::string path = "/tmp/stagroute_test_fixture.json";
  write_file(path, text);
  const Instance inst = load_instance(path);
  REQUIRE(inst.trip_count() == 3);
  CHECK(inst.horizon_s() == 600.0);
  CHECK(inst.trips()[0].max_stagger_s == 12.5);
  CHECK(inst.trips()[0].routes.routes[0].free_flow_s == doctest::Approx(50.0));
  CHECK(inst.trips()[0].routes.routes[0].length_m == doctest::Approx(250.0));
  CHECK(inst.trips()[1].controlled == false);
  CHECK(inst.baseline_free_flow_s(2) == doctest::Approx(30.0));
}

TEST_CASE("schema violations name the offending trip") {
  const std::string text = R"({
    "horizon_s": 600.0,
    "network": {"nodes": [0, 1],
                "arcs": [{"id": 0, "tail": 0, "head": 1, "length_m": 100.0, "nominal_s": 20.0}]},
    "delay": {"type": "piecewise", "headway_s": 15.0, "segments": 3},
    "trips": [
      {"id": 0, "origin": 0, "dest": 1, "earliest_departure_s": 0.0,
       "latest_arrival_s": 100.0, "max_stagger_s": 5.0, "controlled": true,
       "routes": {"k_requested": 1, "theta": 0.6, "routes": [{"arcs": [7]}]}}
    ]
  })";
  const std::string path = "/tmp/stagroute_bad_fixture.json";
  write_file(path, text);
  try {
    load_instance(path);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("trip 0") != std::string::npos);
    CHECK(msg.find("arc id 7") != std::string::npos);
  }
  CHECK_THROWS_AS(load_instance("/tmp/definitely_missing_instance.json"), IoError);

  write_file(path, "{ not json");
  CHECK_THROWS_AS(load_instance(path), IoError);
}

TEST_CASE("generation parameter validation") {
  const Network net = make_grid(3, 3);
  GenParams params;
  params.n_trips = 0;
  CHECK_THROWS_AS(generate_synthetic(net, PiecewiseRecipe{}, params), UsageError);
  params.n_trips = 1;
  params.horizon_s = -5.0;
  CHECK_THROWS_AS(generate_synthetic(net, PiecewiseRecipe{}, params), UsageError);
}
