#include <gtest/gtest.h>

#include <thread>

#include "mapft/api.hpp"
#include "support/fixtures.hpp"

using namespace mapft;

namespace {

const std::string kHeader = "map_name,scenario,agents,lower_bound,solution_cost,plan\n";

Benchmark disk_bench() {
  auto bench = Benchmark::load_directory(std::string(MAPFT_TEST_DATA) + "/bench");
  auto maze = GridMap::empty("maze-32-32-2", 6, 6);
  bench.add_map(maze);
  bench.add_scenario(generate_random_scenario(maze, 3, 13, 1));
  return bench;
}

httplib::Request get(std::initializer_list<std::pair<std::string, std::string>> params) {
  httplib::Request req;
  for (const auto& [k, v] : params) req.params.emplace(k, v);
  return req;
}

httplib::Request upload(const std::string& descriptor, const std::string& csv) {
  httplib::Request req;
  req.set_header("Content-Type", "multipart/form-data; boundary=x");
  req.files.emplace("descriptor", httplib::MultipartFormData{"descriptor", descriptor, "batch.txt", "text/plain"});
  req.files.emplace("csv", httplib::MultipartFormData{"csv", csv, "batch.csv", "text/csv"});
  req.body = descriptor + csv;
  return req;
}

template <typename Handler>
std::pair<int, json> call(Handler&& h, const httplib::Request& req) {
  httplib::Response res;
  h(req, res);
  return {res.status, res.get_header_value("Content-Type") == "application/json" ? json::parse(res.body) : json(res.body)};
}

struct Api : ::testing::Test {
  Service service{disk_bench(), Store{}};

  void submit_fixture() {
    auto [status, body] = call([&](auto& q, auto& r) { service.handle_submit(q, r); },
                               upload("algorithm: Demo\nauthors: A\n",
                                      kHeader + "empty-8-8,even-1,1,1,1,r\n"
                                                "empty-8-8,even-1,2,,4,\"r;dlu\"\n"
                                                "empty-8-8,even-1,3,,2,\"r;l;dd\"\n"));
    ASSERT_EQ(status, 200) << body.dump();
  }
};

}  // namespace

TEST_F(Api, EmptyStoreIsAllUnknownByDomain) {
  auto [status, body] = call([&](auto& q, auto& r) { service.handle_progress(q, r); }, get({}));
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body["group_by"], "domain");
  ASSERT_EQ(body["groups"].size(), 6u);
  EXPECT_EQ(body["groups"][0]["key"], "Game");
  EXPECT_EQ(body["groups"][0]["total"], 0);
  EXPECT_EQ(body["summary"]["unknown_pct"], 100.0);
  EXPECT_EQ(body["summary"]["total"], 7);
}

TEST_F(Api, ProgressGroupsFollowTheScope) {
  submit_fixture();
  auto [s1, by_map] = call([&](auto& q, auto& r) { service.handle_progress(q, r); }, get({{"domain", "open"}}));
  ASSERT_EQ(s1, 200);
  EXPECT_EQ(by_map["group_by"], "map");
  ASSERT_EQ(by_map["groups"].size(), 1u);
  EXPECT_EQ(by_map["groups"][0]["key"], "empty-8-8");

  auto [s2, by_scen] = call([&](auto& q, auto& r) { service.handle_progress(q, r); }, get({{"map", "empty-8-8"}}));
  EXPECT_EQ(by_scen["groups"][0]["key"], "even-1");
  EXPECT_EQ(by_scen["groups"][0]["closed"], 1);
  EXPECT_EQ(by_scen["groups"][0]["solved"], 1);

  auto [s3, by_k] = call([&](auto& q, auto& r) { service.handle_progress(q, r); },
                         get({{"map", "empty-8-8"}, {"scenario", "even-1"}}));
  ASSERT_EQ(by_k["groups"].size(), 4u);
  EXPECT_EQ(by_k["groups"][1]["key"], "2");
  EXPECT_EQ(by_k["groups"][1]["solved_pct"], 100.0);

  // The served numbers are the tracking-core numbers.
  Scope scope;
  scope.map = "empty-8-8";
  const auto direct = service.read([&](const RecordBook& b) { return progress_summary(service.benchmark(), b, scope); });
  EXPECT_EQ(by_scen["summary"], summary_to_json(direct));
}

TEST_F(Api, ScopeErrors) {
  auto status = [&](httplib::Request req) {
    return call([&](auto& q, auto& r) { service.handle_progress(q, r); }, req).first;
  };
  EXPECT_EQ(status(get({{"map", "nowhere"}})), 404);
  EXPECT_EQ(status(get({{"map", "empty-8-8"}, {"scenario", "even-7"}})), 404);
  EXPECT_EQ(status(get({{"scenario", "even-1"}})), 400);
  EXPECT_EQ(status(get({{"map", "empty-8-8"}, {"scenario", "odd-1"}})), 400);
  EXPECT_EQ(status(get({{"agents_min", "x"}})), 400);
  EXPECT_EQ(status(get({{"domain", "Game"}})), 404);
  EXPECT_EQ(status(get({{"group_by", "colour"}})), 400);
}

TEST_F(Api, ReadsAreByteIdenticalBetweenWrites) {
  submit_fixture();
  httplib::Response a, b;
  service.handle_comparison(get({{"map", "empty-8-8"}}), a);
  service.handle_comparison(get({{"map", "empty-8-8"}}), b);
  EXPECT_EQ(a.body, b.body);
}

TEST_F(Api, ComparisonSeries) {
  submit_fixture();
  auto [status, body] = call([&](auto& q, auto& r) { service.handle_comparison(q, r); },
                             get({{"map", "empty-8-8"}, {"metric", "closed"}}));
  ASSERT_EQ(status, 200) << body.dump();
  ASSERT_EQ(body["series"].size(), 1u);
  EXPECT_EQ(body["series"][0]["algorithm"], "Demo");
  EXPECT_EQ(body["series"][0]["points"].size(), 4u);
  EXPECT_EQ(body["series"][0]["points"][0]["value"], 100.0);
  EXPECT_EQ(body["series"][0]["points"][1]["value"], 0.0);
  EXPECT_EQ(body["series"][0]["totals"]["solved"], 2);

  EXPECT_EQ(call([&](auto& q, auto& r) { service.handle_comparison(q, r); }, get({{"metric", "speed"}})).first, 400);
  EXPECT_EQ(call([&](auto& q, auto& r) { service.handle_comparison(q, r); }, get({{"algorithms", "Demo,Ghost"}})).first,
            404);
}

TEST_F(Api, InstancesArePaged) {
  auto [status, body] = call([&](auto& q, auto& r) { service.handle_instances(q, r); },
                             get({{"limit", "3"}, {"offset", "2"}}));
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body["total"], 7);
  ASSERT_EQ(body["items"].size(), 3u);
  EXPECT_EQ(body["items"][0]["instance"]["agents"], 3);
  EXPECT_EQ(body["items"][2]["instance"]["map"], "maze-32-32-2");
}

TEST_F(Api, PlanPayloadRevalidates) {
  submit_fixture();
  auto [status, body] = call([&](auto& q, auto& r) { service.handle_plan(q, r); },
                             get({{"map", "empty-8-8"}, {"scenario", "even-1"}, {"agents", "2"}}));
  ASSERT_EQ(status, 200) << body.dump();
  EXPECT_EQ(body["cost"], 4);
  ASSERT_EQ(body["agents"].size(), 2u);
  std::vector<AgentPair> pairs;
  std::vector<ActionSeq> plans;
  for (const auto& a : body["agents"]) {
    pairs.push_back({{a["start"][0], a["start"][1]}, {a["goal"][0], a["goal"][1]}});
    plans.push_back(parse_plan(a["plan"].get<std::string>()));
  }
  const auto verdict = validate_plan_set(service.benchmark().map("empty-8-8"), pairs, plans);
  EXPECT_TRUE(verdict.valid);
  EXPECT_EQ(verdict.computed_cost, body["cost"].get<std::int64_t>());

  EXPECT_EQ(call([&](auto& q, auto& r) { service.handle_plan(q, r); },
                 get({{"map", "empty-8-8"}, {"scenario", "even-1"}, {"agents", "4"}}))
                .first,
            404);
}

TEST_F(Api, SubmissionReportsAndErrors) {
  auto [status, body] = call([&](auto& q, auto& r) { service.handle_submit(q, r); },
                             upload("algorithm: Demo\nauthors: A\n",
                                    kHeader + "empty-8-8,even-1,1,1,1,r\nempty-8-8,even-1,2,,2,\"r;l\"\n"
                                              "empty-8-8,even-1,9,,2,\"r;l\"\n"));
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body["outcomes"].size(), 3u);
  EXPECT_EQ(body["outcomes"][1]["status"], "PlanInvalid");
  EXPECT_EQ(body["outcomes"][2]["status"], "UnknownInstance");

  auto [s2, missing] = call([&](auto& q, auto& r) { service.handle_submit(q, r); },
                            upload("algorithm: Demo\nauthors: A\n", "empty-8-8,even-1,1,1,1,r\n"));
  EXPECT_EQ(s2, 400);
  EXPECT_EQ(missing["error"]["code"], "MissingHeader");

  httplib::Request bare;
  EXPECT_EQ(call([&](auto& q, auto& r) { service.handle_submit(q, r); }, bare).first, 400);
}

TEST_F(Api, RevocationNoticeListsInstances) {
  call([&](auto& q, auto& r) { service.handle_submit(q, r); },
       upload("algorithm: Liar\nauthors: L\n", kHeader + "empty-8-8,even-1,2,9,,\nempty-8-8,even-1,3,9,,\n"));
  auto [status, body] = call([&](auto& q, auto& r) { service.handle_submit(q, r); },
                             upload("algorithm: Demo\nauthors: A\n", kHeader + "empty-8-8,even-1,2,,4,\"r;dlu\"\n"));
  ASSERT_EQ(status, 200);
  ASSERT_EQ(body["revocations"].size(), 1u);
  EXPECT_EQ(body["revocations"][0]["instances"].size(), 2u);
}

TEST(ApiLimits, OversizeAndAsyncJobs) {
  ServiceConfig config;
  config.upload_cap = 400;
  config.async_threshold = 60;
  Service service(disk_bench(), Store{}, config);
  auto [big, _] = call([&](auto& q, auto& r) { service.handle_submit(q, r); },
                       upload("algorithm: Demo\nauthors: A\n", kHeader + std::string(500, '\n')));
  EXPECT_EQ(big, 413);

  auto [status, job] = call([&](auto& q, auto& r) { service.handle_submit(q, r); },
                            upload("algorithm: Demo\nauthors: A\n", kHeader + "empty-8-8,even-1,1,1,1,r\n"));
  ASSERT_EQ(status, 202) << job.dump();
  service.drain();
  // handle_job reads the id from the route match; go through a real server for that.
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/v1/submissions/" + job["job"].get<std::string>());
  ASSERT_TRUE(res);
  const auto done = json::parse(res->body);
  EXPECT_EQ(done["status"], "done");
  EXPECT_EQ(done["report"]["accepted"], 1);
  EXPECT_EQ(client.Get("/api/v1/submissions/job-999")->status, 404);
  server.stop();
  t.join();
}

TEST(ApiHttp, EndToEnd) {
  Service service(disk_bench(), Store{});
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  httplib::Client client("127.0.0.1", port);

  httplib::MultipartFormDataItems items{
      {"descriptor", "algorithm: Demo\nauthors: A\n", "d.txt", "text/plain"},
      {"csv", kHeader + "empty-8-8,even-1,1,1,1,r\nempty-8-8,even-1,4,,6,\"r;dlu;dd;w\"\n", "b.csv", "text/csv"}};
  auto posted = client.Post("/api/v1/submissions", items);
  ASSERT_TRUE(posted);
  EXPECT_EQ(posted->status, 200) << posted->body;
  EXPECT_EQ(json::parse(posted->body)["accepted"], 2);

  auto exported = client.Get("/api/v1/export?level=domain");
  ASSERT_TRUE(exported);
  EXPECT_EQ(exported->status, 200);
  EXPECT_NE(exported->get_header_value("Content-Disposition").find("attachment"), std::string::npos);
  const auto rows = csv::parse(exported->body);
  EXPECT_EQ(rows.size(), 7u);  // header + 6 domains

  auto inst = client.Get("/api/v1/export?level=instance&map=empty-8-8");
  ASSERT_TRUE(inst);
  EXPECT_NE(inst->body.find("empty-8-8,even-1,4,,6,solved,,Demo,"), std::string::npos) << inst->body;
  EXPECT_EQ(client.Get("/api/v1/export?level=instance&domain=Game")->status, 404);

  httplib::Headers gzip{{"Accept-Encoding", "gzip"}};
  auto plan = client.Get("/api/v1/plan?map=empty-8-8&scenario=even-1&agents=4", gzip);
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->status, 200);
  EXPECT_EQ(json::parse(plan->body)["agents"].size(), 4u);

  auto map = client.Get("/api/v1/map?name=empty-8-8");
  EXPECT_EQ(json::parse(map->body)["rows"].size(), 8u);
  auto algos = client.Get("/api/v1/algorithms");
  EXPECT_EQ(json::parse(algos->body)["algorithms"][0]["name"], "Demo");
  auto sub = client.Get("/api/v1/suboptimality?map=empty-8-8&scenario=even-1");
  EXPECT_EQ(json::parse(sub->body)["points"].size(), 2u);

  server.stop();
  t.join();
}
