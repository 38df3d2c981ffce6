// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>

#include "minipacs/dicom/anonymize.hpp"
#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/uids.hpp"
#include "minipacs/error.hpp"
#include "minipacs/storage/file_backend.hpp"
#include "minipacs/storage/gzip.hpp"
#include "minipacs/storage/memory_backend.hpp"
#include "minipacs/storage/transform.hpp"
#include "support/generators.hpp"
#include "support/test_util.hpp"

using namespace minipacs;
using namespace minipacs::storage;
using minipacs::testing::make_instance;
using minipacs::testing::TempDir;

namespace {

dicom::DicomObject instance(std::string_view sop, std::string_view study = "1.2.3", std::string_view series = "1.2.3.4",
                            std::string_view name = "Doe^J") {
  return dicom::DicomObject::from_dataset(make_instance(name, "P1", study, series, sop, "CT"),
                                          dicom::uids::kExplicitVrLittleEndian);
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::Malformed;
}

}  // namespace

TEST_SUITE("storage uri") {
  TEST_CASE("parse and render") {
    auto u = StorageUri::parse("file:///a/b/c.dcm");
    CHECK(u.scheme == "file");
    CHECK(u.path == "/a/b/c.dcm");
    CHECK(u.str() == "file:///a/b/c.dcm");
    CHECK(u.filename() == "c.dcm");
    CHECK(StorageUri::parse("mem://a").path == "a");
    CHECK(code_of([] { StorageUri::parse("/no/scheme"); }) == Errc::BadUri);
    CHECK(code_of([] { StorageUri::parse("File://x"); }) == Errc::BadUri);
    CHECK(code_of([] { StorageUri::parse("file:///a/../etc"); }) == Errc::BadUri);
  }

  TEST_CASE("rendering parses back to an equal value") {
    minipacs::testing::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      StorageUri u{minipacs::testing::random_chars(rng, "abcxyz", 1, 5),
                   "/" + minipacs::testing::random_chars(rng, "ab/.c9_", 0, 20)};
      if (u.path.find("/../") != std::string::npos || u.has_suffix("/..")) continue;
      CHECK(StorageUri::parse(u.str()) == u);
    }
  }

  TEST_CASE("depth-first order compares segments") {
    CHECK(path_order_less("a/b.dcm", "a.b/c.dcm"));
    CHECK_FALSE(std::string("a/b.dcm") < std::string("a.b/c.dcm"));
  }
}

TEST_SUITE("file backend") {
  TEST_CASE("stores at the study/series/sop layout") {
    TempDir dir;
    FileBackend backend(dir.path());
    auto uri = backend.store(instance("1.2.3.4.5"));
    CHECK(uri == StorageUri::from_path(dir.path() / "1.2.3" / "1.2.3.4" / "1.2.3.4.5.dcm"));
    CHECK(std::filesystem::is_regular_file(dir.path() / "1.2.3/1.2.3.4/1.2.3.4.5.dcm"));
    CHECK(dicom::parse_object(backend.at(uri)) == instance("1.2.3.4.5"));
  }

  TEST_CASE("second store of a SOP instance replaces the first") {
    TempDir dir;
    FileBackend backend(dir.path());
    backend.store(instance("1.2.3.4.5", "1.2.3", "1.2.3.4", "First^A"));
    auto uri = backend.store(instance("1.2.3.4.5", "1.2.3", "1.2.3.4", "Second^B"));
    CHECK(backend.list(StorageUri::from_path(dir.path())).size() == 1);
    CHECK(dicom::get_value_string(dicom::parse_object(backend.at(uri)).dataset(), "PatientName") == "Second^B");
  }

  TEST_CASE("unwritable root is an IoFailure") {
    TempDir dir;
    minipacs::testing::write_file(dir / "blocker", {1, 2, 3});
    FileBackend backend(dir / "blocker" / "root");
    CHECK(code_of([&] { backend.store(instance("1.2.3.4.5")); }) == Errc::IoFailure);
  }

  TEST_CASE("unsafe UIDs never become paths") {
    TempDir dir;
    FileBackend backend(dir.path());
    auto ds = make_instance("A^B", "P", "1.2", "1.2.3", "../../evil", "CT");
    auto obj = dicom::DicomObject::from_dataset(ds, dicom::uids::kExplicitVrLittleEndian);
    CHECK(code_of([&] { backend.store(obj); }) == Errc::InvalidObject);
  }

  TEST_CASE("list is depth-first lexicographic") {
    TempDir dir;
    FileBackend backend(dir.path());
    backend.store(instance("1.2.3.2.9", "1.2.3", "1.2.3.2"));
    backend.store(instance("1.2.3.1.2", "1.2.3", "1.2.3.1"));
    backend.store(instance("1.2.3.1.1", "1.2.3", "1.2.3.1"));
    auto all = backend.list(StorageUri::from_path(dir.path()));
    REQUIRE(all.size() == 3);
    CHECK(all[0].filename() == "1.2.3.1.1.dcm");
    CHECK(all[1].filename() == "1.2.3.1.2.dcm");
    CHECK(all[2].filename() == "1.2.3.2.9.dcm");

    TempDir empty;
    CHECK(backend.list(StorageUri::from_path(empty.path())).empty());
    CHECK(backend.list(all[1]) == std::vector<StorageUri>{all[1]});
  }

  TEST_CASE("remove makes the object unreachable") {
    TempDir dir;
    FileBackend backend(dir.path());
    auto uri = backend.store(instance("1.2.3.4.5"));
    CHECK(backend.remove(uri));
    CHECK_FALSE(backend.remove(uri));
    CHECK(code_of([&] { backend.at(uri); }) == Errc::NotFound);
    CHECK(backend.list(StorageUri::from_path(dir.path())).empty());
  }
}

TEST_SUITE("memory backend") {
  TEST_CASE("read your writes, list, remove") {
    MemoryBackend backend;
    auto a = backend.store(instance("1.2.3.4.1"));
    auto b = backend.store(instance("1.2.3.4.2"));
    CHECK(a.str() == "mem://1.2.3/1.2.3.4/1.2.3.4.1.dcm");
    CHECK(dicom::parse_object(backend.at(a)) == instance("1.2.3.4.1"));
    CHECK(backend.list(StorageUri{"mem", ""}) == std::vector<StorageUri>{a, b});
    CHECK(backend.list(StorageUri{"mem", "1.2.3"}).size() == 2);
    CHECK(backend.list(StorageUri{"mem", "1.2"}).empty());
    CHECK(backend.remove(a));
    CHECK(code_of([&] { backend.at(a); }) == Errc::NotFound);
    CHECK(backend.list(StorageUri{"mem", ""}) == std::vector<StorageUri>{b});
  }
}

TEST_SUITE("transforms") {
  TEST_CASE("gzip round trip and corruption") {
    std::vector<std::uint8_t> data(100000);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i % 7);
    auto packed = gzip_compress(data);
    CHECK(packed.size() < data.size());
    CHECK(packed[0] == 0x1F);
    CHECK(packed[1] == 0x8B);
    CHECK(gzip_decompress(packed) == data);
    packed.resize(packed.size() / 2);
    CHECK(code_of([&] { gzip_decompress(packed); }) == Errc::Corrupt);
    CHECK(code_of([] { gzip_decompress(std::vector<std::uint8_t>{1, 2, 3}); }) == Errc::Corrupt);
  }

  TEST_CASE("compress wrapper reads back the uncompressed serialization") {
    TempDir dir;
    auto base = std::make_shared<FileBackend>(dir.path());
    CompressingBackend gz(base);
    auto obj = instance("1.2.3.4.5");
    auto uri = gz.store(obj, {});
    CHECK(uri.has_suffix(".dcm.gz"));
    CHECK(gz.scheme() == "file");
    CHECK(gz.at(uri) == dicom::serialize_object(obj, obj.transfer_syntax()));
    CHECK(base->at(uri) != gz.at(uri));
  }

  TEST_CASE("inflate of a truncated payload is Corrupt") {
    TempDir dir;
    auto base = std::make_shared<FileBackend>(dir.path());
    CompressingBackend gz(base);
    auto uri = gz.store(instance("1.2.3.4.5"), {});
    auto raw = base->at(uri);
    raw.resize(raw.size() - 8);
    minipacs::testing::write_file(uri.path, raw);
    CHECK(code_of([&] { gz.at(uri); }) == Errc::Corrupt);
  }

  TEST_CASE("anonymize wrapper blanks PatientName") {
    auto base = std::make_shared<MemoryBackend>();
    AnonymizingBackend anon(base, dicom::default_anonymization_profile());
    auto uri = anon.store(instance("1.2.3.4.5"), {});
    auto back = dicom::parse_object(anon.at(uri));
    CHECK(dicom::get_value_string(back.dataset(), "PatientName") == "");
    CHECK(dicom::get_value_string(back.dataset(), "Modality") == "CT");
    CHECK(back.sop_instance_uid() == "1.2.3.4.5");
  }

  TEST_CASE("both composition orders satisfy read-your-writes") {
    auto obj = instance("1.2.3.4.5");
    auto expected = obj.with_dataset(dicom::anonymize(obj.dataset(), dicom::default_anonymization_profile()));
    auto base1 = std::make_shared<MemoryBackend>();
    auto gz_outer = std::make_shared<CompressingBackend>(
        std::make_shared<AnonymizingBackend>(base1, dicom::default_anonymization_profile()));
    auto base2 = std::make_shared<MemoryBackend>();
    auto anon_outer = std::make_shared<AnonymizingBackend>(std::make_shared<CompressingBackend>(base2),
                                                           dicom::default_anonymization_profile());
    for (const std::shared_ptr<StorageBackend>& chain : {std::static_pointer_cast<StorageBackend>(gz_outer),
                                                         std::static_pointer_cast<StorageBackend>(anon_outer)}) {
      auto uri = chain->store(obj);
      CHECK(uri.has_suffix(".dcm.gz"));
      CHECK(dicom::parse_object(chain->at(uri)) == expected);
    }
  }
}
