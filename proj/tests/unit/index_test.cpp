// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <json.hpp>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/error.hpp"
#include "minipacs/index/index_plugins.hpp"
#include "minipacs/index/inverted_index.hpp"
#include "minipacs/storage/gzip.hpp"
#include "support/generators.hpp"
#include "support/query_oracle.hpp"
#include "support/test_util.hpp"

using namespace minipacs;
using namespace minipacs::index;
using namespace minipacs::testing;
using storage::StorageUri;

namespace {

IndexDocument doc(std::string uri, FieldMap fields) {
  IndexDocument d;
  d.uri = std::move(uri);
  d.fields = std::move(fields);
  d.study_uid = d.series_uid = d.sop_uid = "1.2";
  return d;
}

std::vector<std::string> uris(const plugin::ResultSet& rs) {
  std::vector<std::string> out;
  for (auto& h : rs.hits) out.push_back(h.uri);
  return out;
}

std::vector<OracleHit> hits(const plugin::ResultSet& rs) {
  std::vector<OracleHit> out;
  for (auto& h : rs.hits) out.push_back({h.uri, h.score});
  return out;
}

std::size_t syntax_error_at(std::string_view text) {
  try {
    parse_query(text);
  } catch (const QuerySyntaxError& e) {
    CHECK(e.code() == Errc::SyntaxError);
    return e.position();
  }
  FAIL("expected a syntax error for: " << text);
  return 0;
}

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(tokenize("Doe^John") == std::vector<std::string>{"doe", "john"});
  CHECK(tokenize("  Chest-CT w/ contrast ") == std::vector<std::string>{"chest", "ct", "w", "contrast"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("^^").empty());
  CHECK(tokenize("S\xc3\xa3o") == std::vector<std::string>{"s\xc3\xa3o"});
}

TEST_CASE("wildcard matching") {
  CHECK(wildcard_match("doe*", "doe^john"));
  CHECK(wildcard_match("d?e", "doe"));
  CHECK_FALSE(wildcard_match("d?e", "de"));
  CHECK(wildcard_match("*", ""));
  CHECK(wildcard_match("*a*b*", "xxaxxbxx"));
  CHECK_FALSE(wildcard_match("*a*b", "xxaxxbxx"));
  CHECK(wildcard_match("", ""));
  CHECK_FALSE(wildcard_match("", "a"));
}

TEST_CASE("extract_fields against the reference dump") {
  auto bytes = read_file(data_dir() / "ref_explicit.dcm");
  auto obj = dicom::parse_object(bytes);
  auto d = extract_fields(obj, StorageUri::parse("file:///a/b.dcm"));
  CHECK(d.uri == "file:///a/b.dcm");
  CHECK(d.sop_uid == "1.2.3.4.5.6.7");
  CHECK(d.study_uid == "1.2.3.4");
  CHECK(d.series_uid == "1.2.3.4.5");
  CHECK(d.patient_id == "PID001");
  CHECK(d.fields.at("Modality") == std::vector<std::string>{"CT"});
  CHECK(d.fields.at("PatientName") == std::vector<std::string>{"Doe^John"});
  CHECK(d.fields.at("00090010") == std::vector<std::string>{"ACME"});
  CHECK_FALSE(d.fields.contains("PixelData"));
  CHECK_FALSE(d.fields.contains("ReferencedImageSequence"));

  auto ref = nlohmann::json::parse(read_text(data_dir() / "ref_explicit.json"));
  std::size_t expected_fields = 0;
  for (auto& [key, el] : ref["elements"].items()) {
    if (key.find('[') != std::string::npos) continue;
    std::string vr = el["vr"];
    if (vr == "SQ" || vr == "OB" || vr == "OW" || vr == "UN") continue;
    ++expected_fields;
    auto name = dicom::keyword_or_hex(*dicom::Tag::parse(key));
    INFO(name);
    REQUIRE(d.fields.contains(name));
    auto& got = d.fields.at(name);
    REQUIRE(got.size() == el["values"].size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      auto& want = el["values"][i];
      if (want.is_string()) {
        CHECK(got[i] == want.get<std::string>());
      } else {
        CHECK(std::stod(got[i]) == doctest::Approx(want.get<double>()));
      }
    }
  }
  CHECK(d.fields.size() == expected_fields);
  CHECK(d.fields.at("ImageType") == std::vector<std::string>{"ORIGINAL", "PRIMARY", "AXIAL"});
}

TEST_CASE("parser derivations") {
  auto q = parse_query("PatientName:Silva AND Modality:CT");
  CHECK(q == QueryNode::conj({QueryNode::term("PatientName", "Silva"), QueryNode::term("Modality", "CT")}));
  CHECK(parse_query("PatientName:Silva Modality:CT") == q);
  CHECK(parse_query("*") == QueryNode::match_all());
  CHECK(parse_query("a OR b c") ==
        QueryNode::disj({QueryNode::term(std::nullopt, "a"),
                         QueryNode::conj({QueryNode::term(std::nullopt, "b"), QueryNode::term(std::nullopt, "c")})}));
  CHECK(parse_query("NOT Modality:CT") == QueryNode::negate(QueryNode::term("Modality", "CT")));
  CHECK(parse_query("StudyDescription:\"Chest CT\"") == QueryNode::term("StudyDescription", "Chest CT"));
  CHECK(parse_query("\"a \\\"b\\\"\"") == QueryNode::term(std::nullopt, "a \"b\""));
  CHECK(parse_query("StudyTime:12:30") == QueryNode::term("StudyTime", "12:30"));
  CHECK(parse_query("(a OR b) AND NOT (c)") ==
        QueryNode::conj({QueryNode::disj({QueryNode::term(std::nullopt, "a"), QueryNode::term(std::nullopt, "b")}),
                         QueryNode::negate(QueryNode::term(std::nullopt, "c"))}));
  CHECK(parse_query("and or") ==
        QueryNode::conj({QueryNode::term(std::nullopt, "and"), QueryNode::term(std::nullopt, "or")}));
}

TEST_CASE("parser errors carry positions") {
  CHECK(syntax_error_at("Modality:(CT") == 9);
  CHECK(syntax_error_at("") == 0);
  CHECK(syntax_error_at("   ") == 3);
  CHECK(syntax_error_at("AND") == 0);
  CHECK(syntax_error_at("a AND") == 5);
  CHECK(syntax_error_at("(a") == 2);
  CHECK(syntax_error_at("a)") == 1);
  CHECK(syntax_error_at("\"abc") == 0);
  CHECK(syntax_error_at("Modality: CT") == 9);
  CHECK(syntax_error_at("Pat-ient:x") == 0);
  CHECK(syntax_error_at("NOT NOT a") == 4);
  CHECK(syntax_error_at(std::string(100, '(') + "a" + std::string(100, ')')) == 64);
}

TEST_CASE("printer round-trips random trees") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto q = random_query(rng);
    auto text = to_string(q);
    INFO(text);
    CHECK(parse_query(text) == q);
  }
  auto odd = QueryNode::conj({QueryNode::term(std::nullopt, "AND"), QueryNode::term(std::nullopt, "*"),
                              QueryNode::term(std::nullopt, "a:b"), QueryNode::term("F", "x y\"\\"),
                              QueryNode::term(std::nullopt, "")});
  CHECK(parse_query(to_string(odd)) == odd);
}

TEST_CASE("parser is total over arbitrary input") {
  Rng rng(5);
  constexpr std::string_view alphabet = "ab:*?\"\\() ANDORNOT\t\x01\xff";
  std::size_t parsed = 0, rejected = 0;
  for (int i = 0; i < 20000; ++i) {
    auto text = random_chars(rng, alphabet, 0, 40);
    try {
      parse_query(text);
      ++parsed;
    } catch (const QuerySyntaxError& e) {
      CHECK(e.position() <= text.size());
      ++rejected;
    }
  }
  CHECK(parsed > 0);
  CHECK(rejected > 0);
}

TEST_CASE("search examples") {
  InvertedIndex idx;
  idx.index_document(doc("mem://d1", {{"Modality", {"CT"}}, {"PatientName", {"Doe^John"}}}));
  idx.index_document(doc("mem://d2", {{"Modality", {"MR"}}, {"PatientName", {"Silva^Ana"}}}));

  CHECK(uris(idx.search(parse_query("Modality:CT"))) == std::vector<std::string>{"mem://d1"});
  CHECK(uris(idx.search(parse_query("Modality:CT OR Modality:MR"))) == std::vector<std::string>{"mem://d1", "mem://d2"});
  CHECK(uris(idx.search(parse_query("modality:ct"))).empty());  // field names are case-sensitive
  CHECK(uris(idx.search(parse_query("Modality:ct"))) == std::vector<std::string>{"mem://d1"});
  CHECK(uris(idx.search(parse_query("PatientName:doe^john"))) == std::vector<std::string>{"mem://d1"});
  CHECK(uris(idx.search(parse_query("PatientName:Doe"))).empty());
  CHECK(uris(idx.search(parse_query("PatientName:Doe*"))) == std::vector<std::string>{"mem://d1"});
  CHECK(uris(idx.search(parse_query("john"))) == std::vector<std::string>{"mem://d1"});
  CHECK(uris(idx.search(parse_query("NOT john"))) == std::vector<std::string>{"mem://d2"});
  CHECK(uris(idx.search(parse_query("*"))).size() == 2);
  for (auto& h : idx.search(parse_query("*")).hits) CHECK(h.score == 0);

  auto scored = idx.search(parse_query("Modality:CT OR silva OR john"));
  REQUIRE(scored.hits.size() == 2);
  CHECK(scored.hits[0].uri == "mem://d1");
  CHECK(scored.hits[0].score == 2);
  CHECK(scored.hits[1].score == 1);
}

TEST_CASE("max_hits and fields filter") {
  InvertedIndex idx;
  for (int i = 0; i < 5; ++i)
    idx.index_document(doc("mem://d" + std::to_string(i), {{"Modality", {"CT"}}, {"PatientID", {std::to_string(i)}}}));
  plugin::QueryOptions opts;
  opts.max_hits = 2;
  opts.fields_filter = {"PatientID", "Missing"};
  auto rs = idx.search(parse_query("Modality:CT"), opts);
  CHECK(rs.total == 5);
  REQUIRE(rs.hits.size() == 2);
  CHECK(rs.hits[0].uri == "mem://d0");
  CHECK(rs.hits[0].fields.size() == 1);
  CHECK(rs.hits[0].fields.at("PatientID") == std::vector<std::string>{"0"});
}

TEST_CASE("re-indexing replaces and unindex removes postings") {
  InvertedIndex idx;
  idx.index_document(doc("mem://a", {{"Modality", {"CT"}}}));
  idx.index_document(doc("mem://b", {{"Modality", {"MR"}}}));
  auto vocab = idx.vocabulary_size();
  idx.index_document(doc("mem://a", {{"Modality", {"US"}}, {"StudyDescription", {"unique words here"}}}));
  CHECK(idx.size() == 2);
  CHECK(uris(idx.search(parse_query("Modality:CT"))).empty());
  CHECK(uris(idx.search(parse_query("Modality:US"))) == std::vector<std::string>{"mem://a"});
  CHECK(idx.vocabulary_size() > vocab);

  CHECK(idx.unindex("mem://a"));
  CHECK_FALSE(idx.unindex("mem://a"));
  CHECK(uris(idx.search(parse_query("*"))) == std::vector<std::string>{"mem://b"});
  CHECK(idx.vocabulary_size() == 2);  // "mr" token and the exact "mr" posting
  CHECK(idx.consistent());
}

TEST_CASE("search equals the linear-scan oracle") {
  Rng rng(2024);
  std::size_t nonempty = 0, total = 0;
  for (int corpus = 0; corpus < 25; ++corpus) {
    auto docs = random_corpus(rng, uniform(rng, 0, 300));
    InvertedIndex idx;
    for (auto& d : docs) idx.index_document(d);
    QueryOracle oracle(idx.documents());
    for (int q = 0; q < 40; ++q) {
      auto query = random_query(rng);
      INFO(to_string(query));
      auto rs = idx.search(query);
      CHECK(hits(rs) == oracle.run(query));
      CHECK(rs.total == rs.hits.size());
      ++total;
      if (!rs.hits.empty()) ++nonempty;
    }
  }
  // The generator must exercise non-trivial result sets.
  CHECK(nonempty * 2 > total);
}

TEST_CASE("index then unindex restores prior results") {
  Rng rng(99);
  auto docs = random_corpus(rng, 120);
  InvertedIndex idx;
  for (std::size_t i = 0; i < 100; ++i) idx.index_document(docs[i]);
  std::vector<QueryNode> battery;
  for (int i = 0; i < 40; ++i) battery.push_back(random_query(rng));
  std::vector<std::vector<OracleHit>> before;
  for (auto& q : battery) before.push_back(hits(idx.search(q)));
  auto vocab = idx.vocabulary_size();

  for (std::size_t i = 100; i < 120; ++i) idx.index_document(docs[i]);
  for (std::size_t i = 100; i < 120; ++i) CHECK(idx.unindex(docs[i].uri));
  for (std::size_t i = 0; i < battery.size(); ++i) CHECK(hits(idx.search(battery[i])) == before[i]);
  CHECK(idx.vocabulary_size() == vocab);
}

TEST_CASE("no dangling postings under random interleavings") {
  Rng rng(3);
  auto docs = random_corpus(rng, 60);
  InvertedIndex idx;
  for (int step = 0; step < 3000; ++step) {
    auto& d = docs[uniform(rng, 0, docs.size() - 1)];
    if (uniform(rng, 0, 2) == 0) {
      idx.unindex(d.uri);
    } else {
      auto changed = d;
      if (uniform(rng, 0, 1)) changed.fields["Modality"] = {std::to_string(step % 7)};
      idx.index_document(changed);
    }
    if (step % 100 == 0) REQUIRE(idx.consistent());
  }
  CHECK(idx.consistent());
  for (auto& d : docs) idx.unindex(d.uri);
  CHECK(idx.vocabulary_size() == 0);
}

TEST_CASE("search order is deterministic") {
  Rng rng(8);
  auto docs = random_corpus(rng, 200);
  InvertedIndex a, b;
  for (auto& d : docs) a.index_document(d);
  for (auto it = docs.rbegin(); it != docs.rend(); ++it) b.index_document(*it);
  for (int i = 0; i < 30; ++i) {
    auto q = random_query(rng);
    CHECK(uris(a.search(q)) == uris(b.search(q)));
  }
}

TEST_CASE("snapshot persistence") {
  TempDir dir;
  Rng rng(21);
  InvertedIndex idx;
  for (auto& d : random_corpus(rng, 150)) idx.index_document(d);
  auto extra = doc("file:///x/y.dcm", {{"PatientName", {"Jos\xc3\xa9"}}});
  extra.patient_id = "P9";
  idx.index_document(extra);
  idx.flush(dir / "idx.mpix");

  InvertedIndex loaded;
  loaded.load(dir / "idx.mpix");
  CHECK(loaded.documents() == idx.documents());
  for (int i = 0; i < 40; ++i) {
    auto q = random_query(rng);
    CHECK(hits(loaded.search(q)) == hits(idx.search(q)));
  }

  InvertedIndex empty;
  empty.index_document(extra);
  empty.load(dir / "absent.mpix");
  CHECK(empty.size() == 0);

  auto bytes = read_file(dir / "idx.mpix");
  auto corrupt_code = [&](std::vector<std::uint8_t> b) {
    write_file(dir / "bad.mpix", b);
    InvertedIndex x;
    try {
      x.load(dir / "bad.mpix");
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Malformed;
  };
  CHECK(corrupt_code({bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() / 2)}) == Errc::Corrupt);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK(corrupt_code(flipped) == Errc::Corrupt);
  CHECK(corrupt_code({'M', 'P'}) == Errc::Corrupt);
  CHECK(corrupt_code({}) == Errc::Corrupt);
}

TEST_CASE("meta-index plugin") {
  auto obj = dicom::DicomObject::from_dataset(make_instance("Doe^John", "P1", "1.2", "1.2.3", "1.2.3.4", "CT"),
                                              dicom::uids::kExplicitVrLittleEndian);
  auto bytes = dicom::serialize_object(obj, dicom::uids::kExplicitVrLittleEndian);
  std::map<std::string, storage::ByteBuffer> store{{"mem://noext", bytes}, {"mem://noext-text", {'h', 'i'}}};
  plugin::PluginContext ctx{[&](const StorageUri& u) { return store.at(u.str()); }};
  IndexPluginSet set(ctx);
  REQUIRE(set.plugins().size() == 2);
  auto indexer = std::dynamic_pointer_cast<MetaIndexer>(set.plugins()[0]);
  auto query = std::dynamic_pointer_cast<MetaQuery>(set.plugins()[1]);
  REQUIRE(indexer);
  REQUIRE(query);

  CHECK(indexer->handles(StorageUri::parse("file:///a/b/c.dcm")));
  CHECK(indexer->handles(StorageUri::parse("file:///a/b/C.DCM")));
  CHECK(indexer->handles(StorageUri::parse("file:///a/b/c.dcm.gz")));
  CHECK_FALSE(indexer->handles(StorageUri::parse("file:///a/readme.txt")));
  CHECK(indexer->handles(StorageUri::parse("mem://noext")));
  CHECK_FALSE(indexer->handles(StorageUri::parse("mem://noext-text")));
  CHECK_FALSE(indexer->handles(StorageUri::parse("mem://missing")));

  std::vector<plugin::StorageItem> items{{StorageUri::parse("mem://a.dcm"), bytes},
                                         {StorageUri::parse("mem://b.dcm.gz"), storage::gzip_compress(bytes)},
                                         {StorageUri::parse("mem://c.dcm"), {1, 2, 3}}};
  auto report = indexer->index(items, {});
  CHECK(report.files_seen == 3);
  CHECK(report.files_indexed == 2);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].uri == "mem://c.dcm");

  auto rs = query->query("PatientName:Doe*", {});
  CHECK(uris(rs) == std::vector<std::string>{"mem://a.dcm", "mem://b.dcm.gz"});
  CHECK_THROWS_AS(query->query("Modality:(CT", {}), QuerySyntaxError);
  CHECK(indexer->unindex(StorageUri::parse("mem://a.dcm")));
  CHECK_FALSE(indexer->unindex(StorageUri::parse("mem://a.dcm")));
  CHECK(set.inverted_index()->size() == 1);
}
