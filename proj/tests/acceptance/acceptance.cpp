// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <functional>
#include <set>

#include "minipacs/dicom/anonymize.hpp"
#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/error.hpp"
#include "minipacs/index/inverted_index.hpp"
#include "minipacs/net/pdu.hpp"
#include "minipacs/storage/file_backend.hpp"
#include "minipacs/storage/memory_backend.hpp"
#include "minipacs/storage/transform.hpp"
#include "support/archive_fixture.hpp"
#include "support/pdu_generators.hpp"
#include "support/query_oracle.hpp"
#include "support/test_plugins.hpp"

using namespace minipacs;
using namespace minipacs::testing;
using nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace tags = dicom::tags;
namespace uids = dicom::uids;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::set<std::string> find_studies(net::DimseClient& c, const std::vector<std::pair<dicom::Tag, std::string>>& filters,
                                   std::uint16_t& status) {
  dicom::DataSet q;
  q.set(dicom::DataElement::text(tags::kQueryRetrieveLevel, dicom::Vr::CS, "STUDY"));
  q.set(dicom::DataElement::empty(tags::kStudyInstanceUid, dicom::Vr::UI));
  for (const auto& [tag, value] : filters) q.set(dicom::DataElement::text(tag, dicom::dict_lookup(tag)->vr, value));
  auto [st, matches] = c.find(q);
  status = st;
  std::set<std::string> out;
  for (const auto& m : matches) out.insert(dicom::get_value_string(m, tags::kStudyInstanceUid).value_or(""));
  return out;
}

plugin::WebResponse api_call(const archive::Archive& a, std::string method, std::string path,
                             std::multimap<std::string, std::string> params = {}) {
  plugin::WebRequest r;
  r.method = std::move(method);
  r.path = std::move(path);
  r.params = std::move(params);
  return a.api().handle(r);
}

std::set<std::string> qido_studies(const archive::Archive& a, std::multimap<std::string, std::string> params) {
  auto r = api_call(a, "GET", "/dicomweb/studies", std::move(params));
  std::set<std::string> out;
  if (r.status != 200) return {"<status " + std::to_string(r.status) + ">"};
  for (const auto& obj : json::parse(r.body)) out.insert(obj["0020000D"]["Value"][0].get<std::string>());
  return out;
}

std::size_t search_total(const archive::Archive& a, const std::string& query) {
  auto r = api_call(a, "GET", "/search", {{"query", query}});
  return r.status == 200 ? json::parse(r.body)["num_results"].get<std::size_t>() : 0;
}

/// 50 instances over 5 studies; studies 0..2 belong to "Pat..." patients.
std::vector<dicom::DataSet> pipeline_corpus() {
  const char* const names[] = {"Patel^Ravi", "Patton^Mary", "Pat^Lee", "Smith^Ann", "Opat^Zed"};
  const char* const modalities[] = {"CT", "MR", "CT", "US", "CR"};
  std::vector<dicom::DataSet> out;
  for (int s = 0; s < 5; ++s) {
    for (int se = 0; se < 2; ++se) {
      for (int i = 0; i < 5; ++i) {
        auto study = fmt::format("2.25.77{}", s);
        auto series = fmt::format("{}.{}", study, se + 1);
        auto ds = make_instance(names[s], fmt::format("PID{}", s), study, series, fmt::format("{}.{}", series, i + 1),
                                modalities[(s + se) % 5]);
        out.push_back(std::move(ds));
      }
    }
  }
  return out;
}

std::string uid_of(const dicom::DataSet& ds, dicom::Tag tag) { return dicom::get_value_string(ds, tag).value_or(""); }

// ---------------------------------------------------------------------------

Outcome codec_round_trip() {
  Outcome o;
  Rng rng(1000);
  int failures = 0, runs = 0;
  for (int i = 0; i < 1000; ++i) {
    for (auto ts : {uids::kExplicitVrLittleEndian, uids::kImplicitVrLittleEndian}) {
      auto obj = random_object(rng, ts);
      ++runs;
      try {
        auto bytes = dicom::serialize_object(obj, ts);
        auto back = dicom::parse_object(bytes);
        if (!(back == obj) || dicom::serialize_object(back, ts) != bytes) ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  o.require(failures == 0, fmt::format("{} of {} round trips failed", failures, runs));
  if (o.pass) o.detail = fmt::format("{} objects in two syntaxes, 0 failures", runs / 2);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  Rng rng(4242);
  double index_seconds = 0;
  std::size_t mismatches = 0, queries = 0, docs_total = 0;
  auto t0 = Clock::now();
  for (int corpus = 0; corpus < 200; ++corpus) {
    auto docs = random_corpus(rng, uniform(rng, 0, 1000));
    docs_total += docs.size();
    index::InvertedIndex idx;
    QueryOracle oracle(docs);
    auto ti = Clock::now();
    for (auto& d : docs) idx.index_document(d);
    index_seconds += seconds_since(ti);
    for (int q = 0; q < 50; ++q) {
      auto query = random_query(rng);
      auto ts = Clock::now();
      auto rs = idx.search(query);
      index_seconds += seconds_since(ts);
      std::vector<OracleHit> got;
      for (auto& h : rs.hits) got.push_back({h.uri, h.score});
      ++queries;
      if (got != oracle.run(query)) {
        if (mismatches == 0) o.require(false, "first mismatch: " + index::to_string(query));
        ++mismatches;
      }
    }
  }
  double total = seconds_since(t0);
  o.require(mismatches == 0, fmt::format("{} mismatches", mismatches));
  o.require(total < 60.0, fmt::format("took {:.1f} s, limit 60 s", total));
  if (o.pass) {
    o.detail = fmt::format("{} queries over {} docs, 0 mismatches, {:.1f} s total ({:.2f} s in the index)", queries,
                           docs_total, total, index_seconds);
  }
  return o;
}

Outcome dimse_pipeline() {
  Outcome o;
  auto t0 = Clock::now();
  ArchiveFixture fx;
  ArchiveScp scp(*fx.archive);
  auto corpus = pipeline_corpus();
  {
    auto c = scp.connect({std::string(uids::kVerification), std::string(uids::kCtImageStorage)});
    o.require(c.echo() == net::status::kSuccess, "C-ECHO status not 0x0000");
    for (const auto& ds : corpus) {
      auto st = c.store(dicom::DicomObject::from_dataset(ds, uids::kExplicitVrLittleEndian));
      o.require(st == net::status::kSuccess, fmt::format("C-STORE status {:#06x}", st));
    }
    c.release();
  }
  fx.archive->tasks().drain();

  std::set<std::string> expected;
  for (const auto& ds : corpus) {
    if (uid_of(ds, tags::kPatientName).starts_with("Pat")) expected.insert(uid_of(ds, tags::kStudyInstanceUid));
  }
  auto c = scp.connect({std::string(uids::kStudyRootFind)});
  std::uint16_t st = 0;
  auto found = find_studies(c, {{tags::kPatientName, "Pat*"}}, st);
  c.release();
  o.require(st == net::status::kSuccess, fmt::format("C-FIND status {:#06x}", st));
  o.require(found == expected && expected.size() == 3, fmt::format("C-FIND returned {} studies", found.size()));

  std::size_t on_disk = 0;
  for (auto& e : std::filesystem::recursive_directory_iterator(fx.storage_root())) on_disk += e.is_regular_file();
  o.require(on_disk == corpus.size(), fmt::format("{} files on disk", on_disk));
  for (const auto& ds : corpus) {
    auto path = fx.storage_root() / uid_of(ds, tags::kStudyInstanceUid) / uid_of(ds, tags::kSeriesInstanceUid) /
                (uid_of(ds, tags::kSopInstanceUid) + ".dcm");
    o.require(std::filesystem::exists(path), "missing " + path.string());
  }
  double took = seconds_since(t0);
  o.require(took < 30.0, fmt::format("took {:.1f} s, limit 30 s", took));
  if (o.pass) o.detail = fmt::format("50 stored, C-FIND Pat* gave the 3 expected studies, {:.2f} s", took);
  return o;
}

Outcome cross_protocol() {
  Outcome o;
  ArchiveFixture fx;
  auto corpus = pipeline_corpus();
  for (const auto& ds : corpus) fx.ingest(ds);
  ArchiveScp scp(*fx.archive);
  auto c = scp.connect({std::string(uids::kStudyRootFind)});

  Rng rng(20);
  const std::vector<std::string> names = {"Pat*", "P*", "*a*", "Smith^Ann", "Pat?on*", "*^L*", "Nobody", "*"};
  const std::vector<std::string> modalities = {"CT", "MR", "U?", "C*", "*"};
  const std::vector<std::string> pids = {"PID1", "PID*", "PID?", "X"};
  std::size_t nonempty = 0;
  for (int i = 0; i < 20; ++i) {
    std::multimap<std::string, std::string> params;
    std::vector<std::pair<dicom::Tag, std::string>> filters;
    auto add = [&](const char* keyword, dicom::Tag tag, const std::vector<std::string>& pool) {
      auto p = pool[rng() % pool.size()];
      params.emplace(keyword, p);
      filters.emplace_back(tag, p);
    };
    if (rng() % 3 != 0) add("PatientName", tags::kPatientName, names);
    if (rng() % 2 == 0) add("ModalitiesInStudy", tags::kModalitiesInStudy, modalities);
    if (rng() % 4 == 0) add("PatientID", tags::kPatientId, pids);
    std::uint16_t st = 0;
    auto via_find = find_studies(c, filters, st);
    auto via_qido = qido_studies(*fx.archive, params);
    o.require(st == net::status::kSuccess, fmt::format("C-FIND status {:#06x}", st));
    o.require(via_find == via_qido, fmt::format("filter {} differs: C-FIND {} vs QIDO {}", i, via_find.size(), via_qido.size()));
    nonempty += !via_find.empty();
  }
  c.release();

  for (const auto& ds : corpus) {
    auto path = fmt::format("/dicomweb/studies/{}/series/{}/instances/{}", uid_of(ds, tags::kStudyInstanceUid),
                            uid_of(ds, tags::kSeriesInstanceUid), uid_of(ds, tags::kSopInstanceUid));
    auto r = api_call(*fx.archive, "GET", path);
    if (r.status != 200) {
      o.require(false, fmt::format("WADO {} answered {}", path, r.status));
      continue;
    }
    std::vector<std::uint8_t> bytes(r.body.begin(), r.body.end());
    o.require(dicom::parse_object(bytes).sop_instance_uid() == uid_of(ds, tags::kSopInstanceUid), "WADO bytes for " + path);
  }
  if (o.pass) o.detail = fmt::format("20 filters agree ({} non-empty), 50 WADO retrievals parse", nonempty);
  return o;
}

Outcome lifecycle() {
  Outcome o;
  auto obj_for = [](const char* name, const char* study) {
    auto s = std::string(study);
    return dicom::DicomObject::from_dataset(make_instance(name, "L1", s, s + ".1", s + ".1.1", "CT"),
                                            uids::kExplicitVrLittleEndian);
  };

  {
    ArchiveFixture fx;
    fx.ingest(obj_for("Before^Off", "2.25.501").dataset());
    o.require(search_total(*fx.archive, "*") == 1, "baseline document not searchable");
    fx.archive->shutdown();
    auto cfg = json::parse(read_text(fx.config_path()));
    cfg["plugins"].push_back({{"name", "meta-index"}, {"enabled", false}, {"settings", json::object()}});
    std::ofstream(fx.config_path()) << cfg.dump(2);
    fx.open();
    ArchiveScp scp(*fx.archive);
    auto c = scp.connect({std::string(uids::kCtImageStorage)});
    o.require(c.store(obj_for("After^Off", "2.25.502")) == net::status::kSuccess, "C-STORE failed with indexer disabled");
    c.release();
    fx.archive->tasks().drain();
    o.require(search_total(*fx.archive, "*") == 1, "search grew while the indexer was disabled");
    o.require(search_total(*fx.archive, "PatientName:After*") == 0, "new instance became searchable");
  }

  auto never = std::make_shared<CountingIndexer>("acc-never", [](auto&) { return false; });
  {
    ArchiveFixture fx({}, {}, {std::make_shared<StaticSet>("acc", std::vector<std::shared_ptr<plugin::Plugin>>{never})});
    for (int i = 0; i < 5; ++i) fx.ingest(obj_for("Rejected^All", fmt::format("2.25.6{}", i).c_str()).dataset());
    o.require(never->seen().empty(), fmt::format("rejecting indexer saw {} items", never->seen().size()));
    o.require(search_total(*fx.archive, "*") == 5, "the built-in indexer did not run alongside");
  }

  auto gated = std::make_shared<CountingIndexer>("acc-gated");
  auto gate = std::make_shared<Gate>();
  gated->set_gate(gate);
  {
    ArchiveFixture fx({}, {}, {std::make_shared<StaticSet>("acc", std::vector<std::shared_ptr<plugin::Plugin>>{gated})});
    auto uri = fx.archive->dispatcher().store(obj_for("Gated^One", "2.25.701"));
    auto snap = fx.archive->dispatcher().dispatch_index({uri});
    bool pending = snap.state != plugin::TaskState::Done && gated->seen().empty();
    gate->open();
    auto done = fx.archive->tasks().wait(snap.id);
    o.require(pending, "dispatch_index waited for the gated indexer");
    o.require(done.state == plugin::TaskState::Done && gated->seen().size() == 1, "gated task did not complete");
  }
  if (o.pass) o.detail = "disabled indexer adds nothing; rejecting handles() gives 0 index() calls; dispatch is asynchronous";
  return o;
}

Outcome unindex_paths() {
  Outcome o;
  ArchiveFixture fx;
  auto keep = make_instance("Keep^Me", "U1", "2.25.801", "2.25.801.1", "2.25.801.1.1", "CT");
  auto drop = make_instance("Drop^Me", "U2", "2.25.802", "2.25.802.1", "2.25.802.1.1", "CT");
  fx.ingest(keep);
  auto uri = fx.ingest(drop);
  ArchiveScp scp(*fx.archive);
  auto c = scp.connect({std::string(uids::kStudyRootFind)});
  std::uint16_t st = 0;

  auto visible = [&](const std::string& name, const std::string& study) {
    bool s = search_total(*fx.archive, "PatientName:" + name) == 1;
    bool f = find_studies(c, {{tags::kPatientName, name}}, st).count(study) == 1;
    bool q = qido_studies(*fx.archive, {{"PatientName", name}}).count(study) == 1;
    return std::array<bool, 3>{s, f, q};
  };
  o.require(visible("Drop^Me", "2.25.802") == std::array<bool, 3>{true, true, true}, "not visible before unindex");

  auto r = api_call(*fx.archive, "POST", "/management/unindex", {{"uri", uri.str()}});
  o.require(r.status == 200, fmt::format("unindex answered {}", r.status));
  o.require(visible("Drop^Me", "2.25.802") == std::array<bool, 3>{false, false, false},
            "still visible through a query path after unindex");
  o.require(visible("Keep^Me", "2.25.801") == std::array<bool, 3>{true, true, true}, "unrelated document disappeared");
  c.release();

  auto bytes = fx.archive->dispatcher().resolve(uri)->at(uri);
  o.require(dicom::parse_object(bytes).sop_instance_uid() == "2.25.802.1.1", "storage no longer serves the file");
  if (o.pass) o.detail = "gone from /search, C-FIND and QIDO; storage at() still serves it";
  return o;
}

Outcome fuzz_safety() {
  Outcome o;
  Rng rng(7);
  auto undocumented = [](Errc c, std::initializer_list<Errc> allowed) {
    return std::find(allowed.begin(), allowed.end(), c) == allowed.end();
  };

  std::vector<std::vector<std::uint8_t>> objects;
  for (int i = 0; i < 20; ++i) {
    auto ts = i % 2 ? uids::kImplicitVrLittleEndian : uids::kExplicitVrLittleEndian;
    objects.push_back(dicom::serialize_object(random_object(rng, ts, 12), ts));
  }
  std::size_t parsed = 0, rejected = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> bytes;
    if (i % 3 == 0) {
      bytes.resize(uniform(rng, 0, 400));
      for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
      if (bytes.size() >= 132 && rng() % 2) std::copy_n("DICM", 4, bytes.begin() + 128);
    } else {
      bytes = objects[rng() % objects.size()];
      auto flips = uniform(rng, 1, 6);
      for (std::size_t f = 0; f < flips; ++f) bytes[uniform(rng, 128, bytes.size() - 1)] = static_cast<std::uint8_t>(rng());
      if (rng() % 4 == 0) bytes.resize(uniform(rng, 0, bytes.size()));
    }
    try {
      dicom::parse_object(bytes);
      ++parsed;
    } catch (const Error& e) {
      ++rejected;
      if (undocumented(e.code(), {Errc::MissingMagic, Errc::UnsupportedTransferSyntax, Errc::Truncated, Errc::BadLength,
                                  Errc::BadVr, Errc::InvalidObject})) {
        o.require(false, fmt::format("parse_object raised {}", e.what()));
      }
    }
  }

  std::vector<std::vector<std::uint8_t>> pdus;
  for (int i = 0; i < 50; ++i) pdus.push_back(net::encode_pdu(random_pdu(rng)));
  std::size_t decoded = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> bytes;
    if (i % 2 == 0) {
      bytes.resize(uniform(rng, 0, 300));
      for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
      if (!bytes.empty()) bytes[0] = static_cast<std::uint8_t>(rng() % 9);
    } else {
      bytes = pdus[rng() % pdus.size()];
      auto flips = uniform(rng, 1, 4);
      for (std::size_t f = 0; f < flips; ++f) bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
      if (rng() % 4 == 0) bytes.resize(rng() % bytes.size());
    }
    try {
      net::decode_pdu(bytes);
      ++decoded;
    } catch (const Error& e) {
      if (undocumented(e.code(), {Errc::Truncated, Errc::BadPduType, Errc::Oversize, Errc::Malformed})) {
        o.require(false, fmt::format("decode_pdu raised {}", e.what()));
      }
    }
  }
  o.require(parsed > 0 && rejected > 0 && decoded > 0, "fuzz inputs did not exercise both outcomes");
  if (o.pass) {
    o.detail = fmt::format("parse_object {} ok / {} documented errors; decode_pdu {} ok / {} documented errors", parsed,
                           rejected, decoded, 10000 - decoded);
  }
  return o;
}

Outcome storage_wrappers() {
  Outcome o;
  const auto& profile = dicom::default_anonymization_profile();
  Rng rng(8);
  TempDir dir;
  auto plain = std::make_shared<storage::FileBackend>(dir / "plain");
  auto files = std::make_shared<storage::FileBackend>(dir / "gz");
  storage::CompressingBackend gz(files);
  storage::AnonymizingBackend anon(std::make_shared<storage::MemoryBackend>(), profile);

  for (int i = 0; i < 50; ++i) {
    auto ts = i % 2 ? uids::kImplicitVrLittleEndian : uids::kExplicitVrLittleEndian;
    auto obj = random_object(rng, ts, 20);
    auto ds = obj.dataset();
    ds.set(dicom::DataElement::text(tags::kPatientName, dicom::Vr::PN, fmt::format("Named^Patient{}", i)));
    obj = obj.with_dataset(ds);

    auto u1 = gz.store(obj, {});
    o.require(dicom::parse_object(gz.at(u1)) == obj, "compress wrapper read-your-writes");
    auto u2 = anon.store(obj, {});
    auto back = dicom::parse_object(anon.at(u2));
    o.require(back == obj.with_dataset(dicom::anonymize(obj.dataset(), profile)), "anonymize wrapper read-your-writes");
    o.require(dicom::get_value_string(back.dataset(), tags::kPatientName) == "", "anonymized PatientName not empty");
  }

  // 1 MiB of 16-bit pixels with smooth structure, like a real image.
  dicom::Bytes pixels(1 << 20);
  for (std::size_t i = 0; i < pixels.size() / 2; ++i) {
    auto x = i % 512, y = i / 512;
    auto v = static_cast<std::uint16_t>((x * x + y * 3) % 4096);
    pixels[2 * i] = static_cast<std::uint8_t>(v & 0xFF);
    pixels[2 * i + 1] = static_cast<std::uint8_t>(v >> 8);
  }
  auto ds = make_instance("Big^Image", "B1", "2.25.901", "2.25.901.1", "2.25.901.1.1", "CT");
  ds.set(dicom::DataElement::integers(dicom::Tag{0x0028, 0x0010}, dicom::Vr::US, {1024}));
  ds.set(dicom::DataElement::integers(dicom::Tag{0x0028, 0x0011}, dicom::Vr::US, {512}));
  ds.set(dicom::DataElement::bytes(dicom::Tag{0x7FE0, 0x0010}, dicom::Vr::OW, pixels));
  auto big = dicom::DicomObject::from_dataset(ds, uids::kExplicitVrLittleEndian);
  auto serialized = dicom::serialize_object(big, uids::kExplicitVrLittleEndian).size();
  auto gz_uri = gz.store(big, {});
  auto plain_uri = plain->store(big);
  auto gz_size = std::filesystem::file_size(gz_uri.path);
  auto plain_size = std::filesystem::file_size(plain_uri.path);
  o.require(plain_size == serialized, "plain file differs from the serialization");
  o.require(gz_size < serialized, fmt::format("compressed {} >= plain {}", gz_size, serialized));
  o.require(dicom::parse_object(gz.at(gz_uri)) == big, "1 MiB instance does not read back");
  if (o.pass) {
    o.detail = fmt::format("50 objects read back through each wrapper; 1 MiB instance {} bytes plain, {} bytes gzip",
                           serialized, gz_size);
  }
  return o;
}

}  // namespace

int main() {
  auto logger = spdlog::stderr_color_mt("acceptance");
  logger->set_level(spdlog::level::err);
  spdlog::set_default_logger(logger);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"codec-round-trip", codec_round_trip},
      {"oracle-equivalence", oracle_equivalence},
      {"dimse-pipeline", dimse_pipeline},
      {"cross-protocol", cross_protocol},
      {"plugin-lifecycle", lifecycle},
      {"unindex", unindex_paths},
      {"fuzz-safety", fuzz_safety},
      {"storage-wrappers", storage_wrappers},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
