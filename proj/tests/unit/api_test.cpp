#include <gtest/gtest.h>

#include <thread>

#include "support/service_fixture.hpp"

namespace samplebench {
namespace {

using testing::RunningService;
using nlohmann::json;

json generate_body(const std::string& prompt, double top_p = 0.9, double alpha = 0.0,
                   double beta = 0.0) {
  return {{"prompt", prompt},
          {"top_p", top_p},
          {"frequency_penalty", alpha},
          {"presence_penalty", beta},
          {"max_tokens", 40}};
}

void expect_error_shape(const RunningService::Reply& r, int status, const std::string& code) {
  EXPECT_EQ(r.status, status);
  ASSERT_TRUE(r.body.is_object()) << r.body.dump();
  ASSERT_TRUE(r.body.contains("error")) << r.body.dump();
  EXPECT_EQ(r.body["error"]["code"], code);
  EXPECT_TRUE(r.body["error"]["message"].is_string());
  EXPECT_FALSE(r.body["error"]["message"].get<std::string>().empty());
}

TEST(GenerateEndpoint, HappyPathPersistsLocallySampledRecord) {
  RunningService svc;
  const auto r = svc.post("/api/generate", generate_body("The keeper"));
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const auto& rec = r.body["record"];
  EXPECT_TRUE(rec["sampled_locally"].get<bool>());
  EXPECT_EQ(rec["provider_id"], "toy");
  EXPECT_TRUE(rec["rating"].is_null());
  EXPECT_EQ(r.body["generation"]["prng"], "mt19937_64");
  EXPECT_TRUE(rec["params"]["seed"].is_number_unsigned());

  const auto stored = svc.store().get(rec["id"]);
  ASSERT_TRUE(stored);
  EXPECT_EQ(to_json(*stored), rec);
}

TEST(GenerateEndpoint, RangeErrorsNameTheField) {
  RunningService svc;
  auto r = svc.post("/api/generate", generate_body("P", 0.0));
  expect_error_shape(r, 400, "invalid_params");
  EXPECT_EQ(r.body["error"]["field"], "top_p");
  EXPECT_EQ(r.body["error"]["range"], "(0,1]");

  r = svc.post("/api/generate", generate_body("P", 0.5, 2.1));
  expect_error_shape(r, 400, "invalid_params");
  EXPECT_EQ(r.body["error"]["field"], "frequency_penalty");
  EXPECT_EQ(r.body["error"]["range"], "[0,2]");

  r = svc.post("/api/generate", generate_body("P", 0.5, 0, -0.1));
  EXPECT_EQ(r.body["error"]["field"], "presence_penalty");

  r = svc.post("/api/generate", generate_body("   "));
  EXPECT_EQ(r.body["error"]["field"], "prompt");

  auto body = generate_body("P");
  body["max_tokens"] = 0;
  EXPECT_EQ(svc.post("/api/generate", body).body["error"]["field"], "max_tokens");
  body = generate_body("P");
  body["seed"] = -4;
  EXPECT_EQ(svc.post("/api/generate", body).body["error"]["field"], "seed");
  body = generate_body("P");
  body["provider_id"] = "nope";
  EXPECT_EQ(svc.post("/api/generate", body).body["error"]["field"], "provider_id");
  body = generate_body("P");
  body.erase("top_p");
  EXPECT_EQ(svc.post("/api/generate", body).body["error"]["field"], "top_p");

  expect_error_shape(svc.post_raw("/api/generate", "{not json"), 400, "invalid_json");
  EXPECT_EQ(svc.store().size(), 0u);
}

TEST(GenerateEndpoint, ExplicitSeedIsReproducible) {
  RunningService svc;
  auto body = generate_body("The keeper", 0.95, 0.7, 0.4);
  body["seed"] = 31337;
  const auto a = svc.post("/api/generate", body);
  const auto b = svc.post("/api/generate", body);
  ASSERT_EQ(a.status, 200);
  ASSERT_EQ(b.status, 200);
  EXPECT_EQ(a.body["record"]["output"], b.body["record"]["output"]);
  EXPECT_NE(a.body["record"]["id"], b.body["record"]["id"]);
  EXPECT_EQ(a.body["record"]["params"]["seed"], 31337);
}

TEST(GenerateEndpoint, DrawnSeedReproducesStoredOutput) {
  RunningService svc;
  const auto first = svc.post("/api/generate", generate_body("She climbed", 0.8, 1.0, 1.0));
  ASSERT_EQ(first.status, 200);
  auto body = generate_body("She climbed", 0.8, 1.0, 1.0);
  body["seed"] = first.body["record"]["params"]["seed"];
  const auto replay = svc.post("/api/generate", body);
  EXPECT_EQ(replay.body["record"]["output"], first.body["record"]["output"]);
}

TEST(GenerateEndpoint, RemoteProviderForwardsParameters) {
  RunningService svc;
  svc.stub().reply_text("from the stub");
  auto body = generate_body("Hi", 0.9, 0.5, 0.3);
  body["provider_id"] = "remote";
  const auto r = svc.post("/api/generate", body);
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["record"]["output"], "from the stub");
  EXPECT_FALSE(r.body["record"]["sampled_locally"].get<bool>());
  EXPECT_EQ(r.body["record"]["provider_id"], "remote");
  const auto sent = json::parse(svc.stub().bodies().back());
  EXPECT_EQ(sent["top_p"], 0.9);
  EXPECT_EQ(sent["frequency_penalty"], 0.5);
  EXPECT_EQ(sent["presence_penalty"], 0.3);
  EXPECT_EQ(sent["max_tokens"], 40);
}

TEST(GenerateEndpoint, ProviderFailureIs502AndStoresNothing) {
  RunningService svc;
  svc.stub().reply_status(500, "boom");
  auto body = generate_body("Hi");
  body["provider_id"] = "remote";
  const auto r = svc.post("/api/generate", body);
  expect_error_shape(r, 502, "provider_error");
  EXPECT_EQ(r.body["error"]["provider_id"], "remote");
  EXPECT_EQ(r.body["error"]["upstream_status"], 500);
  EXPECT_EQ(svc.store().size(), 0u);
  EXPECT_EQ(svc.stub().bodies().size(), 1u);  // no retry

  svc.stub().reply_malformed();
  expect_error_shape(svc.post("/api/generate", body), 502, "provider_error");
}

TEST(GenerateEndpoint, StorageFailureIs507) {
  if (!std::filesystem::exists("/dev/full")) GTEST_SKIP() << "/dev/full not available";
  RunningService svc("/dev/full");
  const auto r = svc.post("/api/generate", generate_body("P"));
  expect_error_shape(r, 507, "storage_error");
}

TEST(RatingEndpoint, WriteOnceWithErrorCodes) {
  RunningService svc;
  const auto id = svc.post("/api/generate", generate_body("P")).body["record"]["id"].get<std::string>();
  const std::string path = "/api/interactions/" + id + "/rating";

  expect_error_shape(svc.post(path, {{"score", 0}}), 400, "out_of_range");
  expect_error_shape(svc.post(path, {{"score", 6}}), 400, "out_of_range");
  expect_error_shape(svc.post(path, {{"score", 4.5}}), 400, "out_of_range");
  expect_error_shape(svc.post(path, json::object()), 400, "out_of_range");
  expect_error_shape(svc.post_raw(path, "]"), 400, "invalid_json");

  const auto ok = svc.post(path, {{"score", 5}});
  ASSERT_EQ(ok.status, 200);
  EXPECT_EQ(ok.body["record"]["rating"], 5);
  EXPECT_EQ(svc.store().get(id)->rating, 5);

  expect_error_shape(svc.post(path, {{"score", 3}}), 409, "already_rated");
  expect_error_shape(svc.post("/api/interactions/no-such-id/rating", {{"score", 3}}), 404,
                     "not_found");
}

TEST(InteractionsEndpoint, ByPromptAndNewestFirst) {
  RunningService svc;
  std::vector<std::string> p_ids;
  for (int i = 0; i < 2; ++i) {
    p_ids.push_back(svc.post("/api/generate", generate_body("P")).body["record"]["id"]);
  }
  const auto q_id = svc.post("/api/generate", generate_body("Q")).body["record"]["id"];

  auto r = svc.get("/api/interactions?prompt=P");
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["records"].size(), 2u);
  EXPECT_EQ(r.body["records"][0]["id"], p_ids[0]);
  EXPECT_EQ(r.body["records"][1]["id"], p_ids[1]);
  EXPECT_EQ(r.body["total"], 2);

  r = svc.get("/api/interactions");
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["records"].size(), 3u);
  EXPECT_EQ(r.body["records"][0]["id"], q_id);
  EXPECT_EQ(r.body["records"][2]["id"], p_ids[0]);

  r = svc.get("/api/interactions?limit=1&offset=1");
  ASSERT_EQ(r.body["records"].size(), 1u);
  EXPECT_EQ(r.body["records"][0]["id"], p_ids[1]);

  EXPECT_TRUE(svc.get("/api/interactions?prompt=unknown").body["records"].empty());
  EXPECT_TRUE(svc.get("/api/interactions?offset=50").body["records"].empty());

  for (const char* bad : {"limit=0", "limit=1001", "limit=x", "offset=-1", "offset=1.5"}) {
    expect_error_shape(svc.get(std::string("/api/interactions?") + bad), 400, "bad_pagination");
  }
}

TEST(ScoreGraphEndpoint, ProjectsPromptHistory) {
  RunningService svc;
  std::vector<std::string> ids;
  for (double beta : {0.0, 1.0, 2.0}) {
    ids.push_back(svc.post("/api/generate", generate_body("P", 0.9, 0.5, beta)).body["record"]["id"]);
  }
  svc.post("/api/interactions/" + ids[0] + "/rating", {{"score", 2}});
  svc.post("/api/interactions/" + ids[1] + "/rating", {{"score", 4}});

  const auto r = svc.get("/api/interactions/" + ids[2] + "/score-graph");
  ASSERT_EQ(r.status, 200);
  const auto& points = r.body["points"];
  ASSERT_EQ(points.size(), 3u);
  int rated = 0;
  for (const auto& p : points) rated += p.contains("rating");
  EXPECT_EQ(rated, 2);
  EXPECT_EQ(points[1]["presence"], 1.0);
  EXPECT_EQ(points[1]["frequency"], 0.5);
  EXPECT_EQ(points[1]["rating"], 4);
  EXPECT_FALSE(points[2].contains("rating"));
  EXPECT_TRUE(points[2]["current"].get<bool>());
  EXPECT_FALSE(points[0]["current"].get<bool>());

  const auto fresh = svc.post("/api/generate", generate_body("brand new")).body["record"]["id"];
  const auto single = svc.get("/api/interactions/" + fresh.get<std::string>() + "/score-graph");
  ASSERT_EQ(single.body["points"].size(), 1u);
  EXPECT_EQ(single.body["points"][0]["record_id"], fresh);

  expect_error_shape(svc.get("/api/interactions/missing/score-graph"), 404, "not_found");
}

TEST(HyperparametersEndpoint, ThreeDescribedEntries) {
  RunningService svc;
  const auto r = svc.get("/api/hyperparameters");
  ASSERT_EQ(r.status, 200);
  const auto& list = r.body["hyperparameters"];
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[0]["name"], "top_p");
  EXPECT_EQ(list[0]["range"], json::array({0.0, 1.0}));
  EXPECT_TRUE(list[0]["min_exclusive"].get<bool>());
  EXPECT_EQ(list[0]["default"], 0.9);
  EXPECT_EQ(list[1]["name"], "frequency_penalty");
  EXPECT_EQ(list[1]["range"], json::array({0.0, 2.0}));
  EXPECT_EQ(list[1]["default"], 0.0);
  EXPECT_EQ(list[2]["name"], "presence_penalty");
  EXPECT_EQ(list[2]["range"], json::array({0.0, 2.0}));
  EXPECT_EQ(list[2]["default"], 0.0);
  for (const auto& d : list) {
    std::istringstream words(d["summary"].get<std::string>());
    EXPECT_GE(std::distance(std::istream_iterator<std::string>(words),
                            std::istream_iterator<std::string>()),
              20);
  }
}

TEST(Routing, UnknownRouteHasJsonError) {
  RunningService svc;
  expect_error_shape(svc.get("/api/nothing-here"), 404, "not_found");
}

TEST(Service, ConcurrentGenerationsEachPersistOnce) {
  RunningService svc;
  std::vector<std::thread> threads;
  std::mutex mu;
  std::vector<std::string> ids;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      httplib::Client c(svc.client().host(), svc.client().port());
      for (int i = 0; i < 5; ++i) {
        auto res = c.Post("/api/generate", generate_body("C" + std::to_string(t)).dump(),
                          "application/json");
        ASSERT_TRUE(res);
        ASSERT_EQ(res->status, 200);
        std::lock_guard lock(mu);
        ids.push_back(json::parse(res->body)["record"]["id"]);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ids.size(), 20u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 20u);
  EXPECT_EQ(svc.store().size(), 20u);
  for (const auto& id : ids) EXPECT_TRUE(svc.store().get(id));
}

}  // namespace
}  // namespace samplebench
