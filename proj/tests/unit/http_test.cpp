// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fmt/format.h>
#include <httplib.h>

#include <chrono>
#include <set>
#include <thread>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/error.hpp"
#include "minipacs/http/dicom_json.hpp"
#include "minipacs/http/server.hpp"
#include "minipacs/http/webui_plugins.hpp"
#include "minipacs/net/find.hpp"
#include "support/archive_fixture.hpp"

using namespace minipacs;
using minipacs::testing::ArchiveFixture;
using minipacs::testing::install_webui_package;
using minipacs::testing::make_instance;
using nlohmann::json;
namespace tags = dicom::tags;

namespace {

plugin::WebRequest request(std::string method, std::string path, std::multimap<std::string, std::string> params = {},
                           std::string body = {}) {
  plugin::WebRequest r;
  r.method = std::move(method);
  r.path = std::move(path);
  r.params = std::move(params);
  r.body = std::move(body);
  return r;
}

plugin::WebResponse get(const ArchiveFixture& fx, std::string path, std::multimap<std::string, std::string> params = {}) {
  return fx.archive->api().handle(request("GET", std::move(path), std::move(params)));
}

plugin::WebResponse post(const ArchiveFixture& fx, std::string path, std::multimap<std::string, std::string> params = {},
                         std::string body = {}, std::optional<std::string> token = std::nullopt) {
  auto r = request("POST", std::move(path), std::move(params), std::move(body));
  if (token) r.headers["Authorization"] = "Bearer " + *token;
  return fx.archive->api().handle(r);
}

json body_of(const plugin::WebResponse& r) { return json::parse(r.body); }

const char* const kModalities[] = {"CT", "MR", "US", "CR"};
const char* const kNames[] = {"Doe^John", "Doe^Jane", "Silva^Rui", "Smith^Ann", "Dorian^Gray"};

/// 5 studies x 2 series x 2 instances with varied names and modalities.
std::vector<dicom::DataSet> seeded_corpus() {
  std::vector<dicom::DataSet> out;
  for (int s = 0; s < 5; ++s) {
    for (int se = 0; se < 2; ++se) {
      for (int i = 0; i < 2; ++i) {
        auto study = fmt::format("2.25.{}", 100 + s);
        auto series = fmt::format("{}.{}", study, se + 1);
        out.push_back(make_instance(kNames[s], fmt::format("PID{}", s), study, series, fmt::format("{}.{}", series, i + 1),
                                    kModalities[(s + se) % 4]));
      }
    }
  }
  return out;
}

std::set<std::string> qido_studies(const json& arr) {
  std::set<std::string> out;
  for (const auto& obj : arr) out.insert(obj["0020000D"]["Value"][0].get<std::string>());
  return out;
}

}  // namespace

TEST_CASE("dicom json: matches the reference encoder") {
  auto v = json::parse(minipacs::testing::read_text(minipacs::testing::data_dir() / "ref_net_vectors.json"));
  dicom::DataSet ds;
  ds.set(dicom::DataElement::text(tags::kPatientName, dicom::Vr::PN, "Silva^Rui"));
  ds.set(dicom::DataElement::text(tags::kModality, dicom::Vr::CS, "CT"));
  ds.set(dicom::DataElement::empty(tags::kAccessionNumber, dicom::Vr::SH));
  ds.set(dicom::DataElement::text(dicom::Tag{0x0020, 0x0013}, dicom::Vr::IS, "7"));
  ds.set(dicom::DataElement::text(dicom::Tag{0x0018, 0x0050}, dicom::Vr::DS, "2.5"));
  CHECK(http::to_dicom_json(ds) == v["dicom_json"]);

  auto one = [](dicom::DataElement el) {
    dicom::DataSet d;
    d.set(std::move(el));
    return http::to_dicom_json(d);
  };
  CHECK(one(dicom::DataElement::text(tags::kPatientName, dicom::Vr::PN, "Silva^Rui")) ==
        json::parse(R"({"00100010":{"vr":"PN","Value":[{"Alphabetic":"Silva^Rui"}]}})"));
  CHECK(one(dicom::DataElement::text(tags::kModality, dicom::Vr::CS, "CT")) ==
        json::parse(R"({"00080060":{"vr":"CS","Value":["CT"]}})"));
  CHECK(one(dicom::DataElement::text(tags::kModality, dicom::Vr::CS, "")) == json::parse(R"({"00080060":{"vr":"CS"}})"));
  CHECK(one(dicom::DataElement::integers(dicom::Tag{0x0028, 0x0010}, dicom::Vr::US, {512})) ==
        json::parse(R"({"00280010":{"vr":"US","Value":[512]}})"));
  CHECK(one(dicom::DataElement::bytes(tags::kPixelData, dicom::Vr::OB, {1, 2, 3, 4})) ==
        json::parse(R"({"7FE00010":{"vr":"OB","InlineBinary":"AQIDBA=="}})"));
}

TEST_CASE("http: search") {
  ArchiveFixture fx;
  auto corpus = seeded_corpus();
  for (const auto& ds : corpus) fx.ingest(ds);

  SUBCASE("Modality:CT count equals a linear scan") {
    std::size_t expected = 0;
    for (const auto& ds : corpus) expected += dicom::get_value_string(ds, tags::kModality) == "CT";
    auto r = get(fx, "/search", {{"query", "Modality:CT"}});
    REQUIRE(r.status == 200);
    auto b = body_of(r);
    CHECK(b["num_results"] == expected);
    CHECK(b["results"].size() == expected);
    CHECK(expected == 6);
  }
  SUBCASE("the HTTP layer adds no filtering") {
    for (std::string q : {"*", "PatientName:Do*", "Modality:CT OR Modality:MR", "NOT Modality:US", "john", "PatientID:PID3"}) {
      auto direct = fx.archive->dispatcher().query(q, {});
      auto b = body_of(get(fx, "/search", {{"query", q}}));
      REQUIRE(b["results"].size() == direct.hits.size());
      for (std::size_t i = 0; i < direct.hits.size(); ++i) {
        CHECK(b["results"][i]["uri"] == direct.hits[i].uri);
        CHECK(b["results"][i]["score"] == direct.hits[i].score);
      }
      CHECK(b["num_results"] == direct.total);
    }
  }
  SUBCASE("errors") {
    CHECK(get(fx, "/search", {{"query", ""}}).status == 400);
    CHECK(get(fx, "/search").status == 400);
    auto bad = get(fx, "/search", {{"query", "Modality:(CT"}});
    CHECK(bad.status == 400);
    CHECK(body_of(bad)["position"] == 9);
    CHECK(get(fx, "/search", {{"query", "*"}, {"provider", "nope"}}).status == 404);
    CHECK(get(fx, "/search", {{"query", "*"}, {"provider", "meta-query"}}).status == 200);
    CHECK(get(fx, "/search", {{"query", "*"}, {"max", "x"}}).status == 400);
  }
  SUBCASE("max and free text") {
    auto b = body_of(get(fx, "/search", {{"query", "*"}, {"max", "3"}}));
    CHECK(b["results"].size() == 3);
    CHECK(b["num_results"] == corpus.size());
    auto words = body_of(get(fx, "/search", {{"query", "silva rui"}, {"keyword", "false"}}));
    CHECK(words["num_results"] == 4);
    CHECK(get(fx, "/search", {{"query", "AND"}, {"keyword", "false"}}).status == 200);
  }
  SUBCASE("unknown paths and methods") {
    CHECK(get(fx, "/nothing").status == 404);
    CHECK(post(fx, "/search", {{"query", "*"}}).status == 405);
  }
}

TEST_CASE("http: management index, unindex and tasks") {
  ArchiveFixture fx;
  minipacs::testing::TempDir incoming;
  auto src = minipacs::testing::data_dir() / "ref_explicit.dcm";
  std::filesystem::copy_file(src, incoming / "a.dcm");

  auto r = post(fx, "/management/index", {{"uri", storage::StorageUri::from_path(incoming.path()).str()}});
  REQUIRE(r.status == 202);
  auto id = body_of(r)["task_id"].get<std::string>();
  fx.archive->tasks().wait(id);
  auto t = body_of(get(fx, "/management/tasks", {{"id", id}}));
  CHECK(t["state"] == "done");
  CHECK(t["progress"] == 1.0);
  CHECK(t["report"]["files_indexed"] == 1);
  CHECK(body_of(get(fx, "/management/tasks")).size() == 1);
  CHECK(get(fx, "/management/tasks", {{"id", "task-999"}}).status == 404);

  auto uri = storage::StorageUri::from_path(incoming / "a.dcm").str();
  CHECK(body_of(get(fx, "/search", {{"query", "PatientID:PID001"}}))["num_results"] == 1);
  auto un = post(fx, "/management/unindex", {{"uri", uri}});
  CHECK(un.status == 200);
  CHECK(body_of(un)["files_indexed"] == 1);
  CHECK(body_of(get(fx, "/search", {{"query", "PatientID:PID001"}}))["num_results"] == 0);

  CHECK(post(fx, "/management/index", {{"uri", "bogus://x"}}).status == 404);
  CHECK(post(fx, "/management/index", {{"uri", "not a uri"}}).status == 400);
  CHECK(post(fx, "/management/index").status == 400);
  CHECK(post(fx, "/management/unindex", {{"uri", "bogus://x"}}).status == 404);
  CHECK(post(fx, "/management/unindex", {{"uri", "file:///a/../b"}}).status == 400);
}

TEST_CASE("http: plugin management") {
  ArchiveFixture fx;
  auto list = body_of(get(fx, "/management/plugins"));
  bool found = false;
  for (const auto& m : list) {
    if (m["name"] == "meta-index") {
      found = true;
      CHECK(m["kind"] == "indexer");
      CHECK(m["enabled"] == true);
    }
  }
  CHECK(found);

  auto r = post(fx, "/management/plugins", {}, R"({"name":"meta-index","enabled":false})");
  CHECK(r.status == 200);
  CHECK(body_of(r)["enabled"] == false);
  for (const auto& m : body_of(get(fx, "/management/plugins"))) {
    if (m["name"] == "meta-index") CHECK(m["enabled"] == false);
  }
  auto persisted = json::parse(minipacs::testing::read_text(fx.config_path()));
  bool persisted_off = false;
  for (const auto& p : persisted["plugins"]) persisted_off |= p["name"] == "meta-index" && p["enabled"] == false;
  CHECK(persisted_off);

  CHECK(post(fx, "/management/plugins", {}, R"({"name":"nope","enabled":false})").status == 404);
  CHECK(post(fx, "/management/plugins", {}, R"({"name":"meta-index"})").status == 400);
  CHECK(post(fx, "/management/plugins", {}, "not json").status == 400);
}

TEST_CASE("http: bearer token guards management") {
  ArchiveFixture fx([](json& cfg) { cfg["http"]["token"] = "s3cret"; });
  fx.ingest(make_instance("Doe^John", "P1", "1.1", "1.1.1", "1.1.1.1", "CT"));
  const auto config_before = minipacs::testing::read_text(fx.config_path());
  auto uri = fx.archive->dispatcher().query("*", {}).hits.at(0).uri;
  const auto tasks_before = fx.archive->tasks().list().size();

  for (auto token : {std::optional<std::string>{}, std::optional<std::string>{"wrong"}}) {
    CHECK(post(fx, "/management/plugins", {}, R"({"name":"meta-index","enabled":false})", token).status == 401);
    CHECK(post(fx, "/management/unindex", {{"uri", uri}}, {}, token).status == 401);
    CHECK(post(fx, "/management/index", {{"uri", uri}}, {}, token).status == 401);
  }
  CHECK(get(fx, "/management/plugins").status == 401);
  CHECK(fx.archive->registry().is_enabled("meta-index"));
  CHECK(fx.archive->inverted_index()->size() == 1);
  CHECK(fx.archive->tasks().list().size() == tasks_before);
  CHECK(minipacs::testing::read_text(fx.config_path()) == config_before);

  CHECK(get(fx, "/search", {{"query", "*"}}).status == 200);
  CHECK(post(fx, "/management/plugins", {}, R"({"name":"meta-index","enabled":false})", "s3cret").status == 200);
  CHECK_FALSE(fx.archive->registry().is_enabled("meta-index"));
}

TEST_CASE("http: web UI descriptors and modules") {
  const std::string batch_js = "export function render(mount) { mount.textContent = 'batch'; }\n";
  ArchiveFixture fx({}, [&](const std::filesystem::path& dir) {
    install_webui_package(dir / "webui", "batch-export", "result-batch", batch_js);
    install_webui_package(dir / "webui", "prefs", "settings", "export function render() {}\n");
    install_webui_package(dir / "webui", "broken", "sidebar", "x");  // unknown slot, skipped
    std::filesystem::create_directories(dir / "webui" / "empty");
  });

  auto all = body_of(get(fx, "/webui"))["plugins"];
  CHECK(all.size() == 2);
  auto batch = body_of(get(fx, "/webui", {{"slot-id", "result-batch"}}))["plugins"];
  REQUIRE(batch.size() == 1);
  CHECK(batch[0] == json{{"name", "batch-export"}, {"slot-id", "result-batch"}, {"caption", "Caption of batch-export"},
                         {"module-file", "module.js"}});

  std::set<std::string> unfiltered, unioned;
  for (const auto& d : all) unfiltered.insert(d.dump());
  for (auto slot : http::kSlotIds) {
    auto listed = body_of(get(fx, "/webui", {{"slot-id", std::string(slot)}}));
    for (const auto& d : listed["plugins"]) {
      CHECK(unfiltered.count(d.dump()) == 1);
      unioned.insert(d.dump());
    }
  }
  CHECK(unioned == unfiltered);
  CHECK(get(fx, "/webui", {{"slot-id", "sidebar"}}).status == 400);

  auto module = get(fx, "/webui/batch-export/module.js");
  CHECK(module.status == 200);
  CHECK(module.content_type == "application/javascript");
  CHECK(module.body == minipacs::testing::read_text(fx.dir / "webui" / "batch-export" / "module.js"));
  CHECK(module.body == batch_js);

  CHECK(get(fx, "/webui/x/../../etc").status == 400);
  CHECK(get(fx, "/webui/batch-export/../prefs/module.js").status == 400);
  CHECK(get(fx, "/webui/batch-export//module.js").status == 400);
  CHECK(get(fx, "/webui/nope/module.js").status == 404);
  CHECK(get(fx, "/webui/batch-export/missing.js").status == 404);
  CHECK(get(fx, "/webui/broken/module.js").status == 404);

  CHECK(post(fx, "/management/plugins", {}, R"({"name":"prefs","enabled":false})").status == 200);
  CHECK(body_of(get(fx, "/webui"))["plugins"].size() == 1);
  CHECK(get(fx, "/webui/prefs/module.js").status == 404);
}

TEST_CASE("http: QIDO-RS agrees with C-FIND") {
  ArchiveFixture fx;
  for (const auto& ds : seeded_corpus()) fx.ingest(ds);
  auto cfind = [&](const std::vector<std::pair<dicom::Tag, std::string>>& filters) {
    dicom::DataSet q;
    q.set(dicom::DataElement::text(tags::kQueryRetrieveLevel, dicom::Vr::CS, "STUDY"));
    q.set(dicom::DataElement::empty(tags::kStudyInstanceUid, dicom::Vr::UI));
    for (const auto& [tag, value] : filters) q.set(dicom::DataElement::text(tag, dicom::dict_lookup(tag)->vr, value));
    auto outcome = fx.archive->scp_handlers().on_find(q);
    REQUIRE(outcome.status == net::status::kSuccess);
    std::set<std::string> out;
    for (const auto& m : outcome.matches) out.insert(*dicom::get_value_string(m, tags::kStudyInstanceUid));
    return out;
  };

  SUBCASE("PatientName=Do*") {
    auto r = get(fx, "/dicomweb/studies", {{"PatientName", "Do*"}});
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "application/dicom+json");
    auto studies = qido_studies(body_of(r));
    CHECK(studies == cfind({{tags::kPatientName, "Do*"}}));
    CHECK(studies == std::set<std::string>{"2.25.100", "2.25.101", "2.25.104"});
  }
  SUBCASE("default attributes") {
    auto arr = body_of(get(fx, "/dicomweb/studies", {{"PatientID", "PID2"}}));
    REQUIRE(arr.size() == 1);
    const auto& s = arr[0];
    CHECK(s["00100010"]["Value"][0]["Alphabetic"] == "Silva^Rui");
    CHECK(s["00100020"]["Value"][0] == "PID2");
    CHECK(s["00080020"]["Value"][0] == "20240115");
    CHECK(s["00080050"]["Value"][0] == "ACCPID2");
    CHECK(s["00080061"]["Value"] == json::array({"CR", "US"}));
    CHECK_FALSE(s.contains("00080052"));
  }
  SUBCASE("no filters, limit and errors") {
    CHECK(body_of(get(fx, "/dicomweb/studies")).size() == 5);
    CHECK(body_of(get(fx, "/dicomweb/studies", {{"limit", "2"}})).size() == 2);
    CHECK(get(fx, "/dicomweb/studies", {{"limit", "-1"}}).status == 400);
    CHECK(get(fx, "/dicomweb/studies", {{"Foo", "1"}}).status == 400);
    CHECK(body_of(get(fx, "/dicomweb/studies", {{"PatientName", "Zz*"}})) == json::array());
    CHECK(body_of(get(fx, "/dicomweb/studies", {{"00100020", "PID1"}})).size() == 1);
  }
  SUBCASE("random filters") {
    minipacs::testing::Rng rng(2024);
    const std::vector<std::string> name_patterns = {"Do*", "D*", "*a*", "Silva^Rui", "Sm?th*", "*^J*", "Nobody"};
    const std::vector<std::string> modality_patterns = {"CT", "MR", "U?", "C*", "*"};
    for (int i = 0; i < 20; ++i) {
      std::multimap<std::string, std::string> params;
      std::vector<std::pair<dicom::Tag, std::string>> filters;
      if (rng() % 3 != 0) {
        auto p = name_patterns[rng() % name_patterns.size()];
        params.emplace("PatientName", p);
        filters.emplace_back(tags::kPatientName, p);
      }
      if (rng() % 2 == 0) {
        auto p = modality_patterns[rng() % modality_patterns.size()];
        params.emplace("Modality", p);
        filters.emplace_back(tags::kModality, p);
      }
      CHECK(qido_studies(body_of(get(fx, "/dicomweb/studies", params))) == cfind(filters));
    }
  }
}

TEST_CASE("http: WADO-RS returns the stored bytes") {
  ArchiveFixture fx;
  auto ds = make_instance("Doe^John", "P1", "1.4", "1.4.1", "1.4.1.1", "CT");
  auto uri = fx.ingest(ds);
  auto r = get(fx, "/dicomweb/studies/1.4/series/1.4.1/instances/1.4.1.1");
  REQUIRE(r.status == 200);
  CHECK(r.content_type == "application/dicom");
  std::vector<std::uint8_t> bytes(r.body.begin(), r.body.end());
  CHECK(dicom::parse_object(bytes).sop_instance_uid() == "1.4.1.1");
  CHECK(bytes == fx.archive->dispatcher().resolve(uri)->at(uri));

  CHECK(get(fx, "/dicomweb/studies/1.4/series/1.4.1/instances/9.9").status == 404);
  CHECK(get(fx, "/dicomweb/studies/1.4/series/1.4.2/instances/1.4.1.1").status == 404);
  CHECK(get(fx, "/dicomweb/studies/1.4/series/1.4.1/instances/abc").status == 400);

  CHECK(post(fx, "/management/plugins", {}, R"({"name":"dicomweb","enabled":false})").status == 200);
  CHECK(get(fx, "/dicomweb/studies/1.4/series/1.4.1/instances/1.4.1.1").status == 404);
}

TEST_CASE("http: server transport") {
  ArchiveFixture fx;
  fx.ingest(make_instance("Doe^John", "P1", "1.5", "1.5.1", "1.5.1.1", "CT"));
  http::HttpServer server(fx.archive->api(), "127.0.0.1", 0);
  server.start();
  httplib::Client client("127.0.0.1", server.port());
  auto res = client.Get("/search?query=PatientName%3ADoe%2A");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["num_results"] == 1);
  auto post_res = client.Post("/management/plugins", R"({"name":"nope","enabled":true})", "application/json");
  REQUIRE(post_res);
  CHECK(post_res->status == 404);
  auto trav = client.Get("/webui/x/../../etc");
  REQUIRE(trav);
  CHECK(trav->status == 400);

  http::HttpServer second(fx.archive->api(), "127.0.0.1", server.port());
  try {
    second.start();
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IoFailure);
  }
  server.stop();
}
