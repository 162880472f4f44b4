#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "doctest.h"
#include "ssrs/checkpoint.hpp"
#include "ssrs/csv.hpp"
#include "ssrs/error.hpp"

using namespace ssrs;

namespace {

Transition tr(std::vector<double> s, std::vector<double> a, double r, std::vector<double> n, bool term) {
  return Transition{std::move(s), std::move(a), r, std::move(n), term};
}

ReplayBuffer golden_buffer() {
  ReplayBuffer b(4);
  b.push(tr({1, 2}, {1, 0}, 0.0, {3, 4}, false));
  b.push(tr({3, 4}, {0, 1}, 0.0, {5, 6}, false));
  b.push(tr({5, 6}, {1, 0}, 1.0, {7, 8}, true));
  b.set_shaped_reward(1, 0.5);
  return b;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("buffer checkpoint matches the frozen version 1 bytes") {
  const auto golden = read_bytes(std::filesystem::path(SSRS_TEST_DATA) / "buffer_v1.bin");
  REQUIRE(golden.size() == 48 + 3 * 10 * 8);
  CHECK(encode_buffer(golden_buffer()) == golden);
  CHECK(decode_buffer(golden) == golden_buffer());

  std::uint64_t count = 0;
  std::memcpy(&count, golden.data() + 40, 8);
  CHECK(count == 3);
  double shaped_reward = 0.0;
  std::memcpy(&shaped_reward, golden.data() + 48 + 80 + 4 * 8, 8);
  CHECK(shaped_reward == 0.5);
}

TEST_CASE("buffer checkpoint round trips a wrapped buffer") {
  ReplayBuffer b(3);
  for (int i = 0; i < 5; ++i) b.push(tr({double(i)}, {0, 1}, i == 3 ? 2.0 : 0.0, {double(i + 1)}, false));
  b.set_shaped_reward(0, -1.0);
  const auto bytes = encode_buffer(b);
  CHECK(decode_buffer(bytes) == b);
  CHECK(encode_buffer(decode_buffer(bytes)) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "ssrs_buf_test.bin";
  save_buffer(path, b);
  CHECK(load_buffer(path) == b);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt buffer checkpoints are rejected") {
  auto bytes = encode_buffer(golden_buffer());
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_buffer(bad_magic), FormatError);
  auto bad_version = bytes;
  bad_version[8] = 2;
  CHECK_THROWS_AS(decode_buffer(bad_version), FormatError);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_buffer(truncated), FormatError);
  CHECK_THROWS_AS(decode_buffer(std::vector<std::uint8_t>(10, 0)), FormatError);
}

TEST_CASE("estimator parameters round trip bit-exactly") {
  const auto p = EstimatorParams::create(3, 2, 4, {5, 3}, 0.25, 11);
  const auto text = encode_params(p);
  CHECK(text.rfind("ssrs-estimator 1\n", 0) == 0);
  const auto back = decode_params(text);
  CHECK(back == p);
  CHECK(encode_params(back) == text);
  CHECK_THROWS(decode_params("ssrs-estimator 2\n"));
  CHECK_THROWS(decode_params(text.substr(0, text.size() / 2)));
}

TEST_CASE("trajectory csv round trip") {
  const std::vector<Transition> steps = {tr({0, 255}, {1, 0}, 0.0, {1, 254}, false),
                                         tr({1, 254}, {0, 1}, 1.5, {2, 253}, true)};
  const auto m = stack_transitions(steps);
  const auto text = encode_trajectory(m);
  CHECK(text.rfind("s0,s1,a0,a1,r\n", 0) == 0);
  CHECK(decode_trajectory(text) == m);
  CHECK_THROWS(decode_trajectory("s0,a0,r\n1,0.5\n"));
}

TEST_CASE("csv helpers") {
  CHECK(std::stod(format_real(0.1)) == 0.1);
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");

  CsvWriter w({"name", "note"});
  w.row({"x", "a,b"}).row({"y", "line\nbreak"});
  const auto t = parse_csv(w.str());
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "a,b");
  CHECK(t.rows[1][1] == "line\nbreak");
  CHECK(t.column("note") == 1);
  CHECK_THROWS_AS(t.column("missing"), FormatError);
  CHECK_THROWS(w.row({"only one"}));
}
