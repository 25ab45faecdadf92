#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "roadscene/protocol/codec.hpp"
#include "roadscene/protocol/sender.hpp"
#include "roadscene/protocol/server.hpp"
#include "roadscene/protocol/session.hpp"
#include "support.hpp"

namespace {

using namespace roadscene;
using namespace roadscene::protocol;
using tiles::TileGrid;

SceneMessage random_message(std::mt19937_64& rng) {
  auto integer = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto word = [&](std::size_t max_len) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz_0123456789";
    std::string s(1, alphabet[integer(0, 25)]);
    const auto n = integer(0, static_cast<std::int64_t>(max_len) - 1);
    for (std::int64_t i = 0; i < n; ++i) s += alphabet[integer(0, static_cast<std::int64_t>(alphabet.size()) - 1)];
    return s;
  };
  switch (integer(0, 5)) {
    case 0: return Hello{kProtocolVersion, integer(1, 4096), integer(1, 4096), real(0.01, 100.0)};
    case 1: return Tile{integer(0, kMaxGridSide - 1), integer(0, kMaxGridSide - 1), integer(0, 15)};
    case 2: return Spawn{word(12), real(-1e6, 1e6), real(-1e6, 1e6), real(-7.0, 7.0)};
    case 3: return Clear{};
    case 4: {
      Commit c{word(40), std::nullopt};
      if (integer(0, 1)) c.tile_count = integer(0, kMaxGridCells);
      return c;
    }
    default: {
      // free-form detail, including quotes, newlines and non-ASCII
      std::string detail = word(10) + " \"quoted\"\n\xc3\xa9\t";
      return Ack{integer(0, 1) ? "ok" : "error", detail, word(8)};
    }
  }
}

TileGrid random_grid(std::mt19937_64& rng, std::size_t w, std::size_t h, double density) {
  TileGrid g(w, h);
  std::bernoulli_distribution on(density);
  for (auto& c : g.cells) {
    if (on(rng)) c = std::uniform_int_distribution<int>(0, 15)(rng);
  }
  return g;
}

TEST(Codec, TileWireFormat) {
  EXPECT_EQ(encode(Tile{3, 4, 10}), "{\"type\":\"tile\",\"x\":3,\"y\":4,\"code\":10}\n");
  EXPECT_EQ(encode(Tile{3, 4, 10}, Framing::datagram), "{\"type\":\"tile\",\"x\":3,\"y\":4,\"code\":10}");
  EXPECT_EQ(encode(Clear{}), "{\"type\":\"clear\"}\n");
}

TEST(Codec, RoundTrip) {
  std::mt19937_64 rng(40);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_message(rng);
    const auto wire = encode(m);
    ASSERT_EQ(std::count(wire.begin(), wire.end(), '\n'), 1) << wire;
    EXPECT_EQ(decode(wire), m) << wire;
    EXPECT_EQ(decode(encode(m, Framing::datagram)), m);
  }
}

TEST(Codec, EncoderValidates) {
  try {
    encode(Hello{kProtocolVersion, -3, 4, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::field_out_of_range);
  }
  EXPECT_THROW(encode(Tile{0, 0, 16}), Error);
  EXPECT_THROW(encode(Spawn{"two words", 0, 0, 0}), Error);
  EXPECT_THROW(encode(Commit{"", std::nullopt}), Error);
  EXPECT_THROW(encode(Hello{2, 4, 4, 1.0}), Error);
}

ErrorCode decode_error(const std::string& bytes) {
  try {
    decode(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decoded: " << bytes;
  return ErrorCode::invalid_argument;
}

TEST(Codec, DecodeErrors) {
  EXPECT_EQ(decode(R"({"type":"clear"})"), SceneMessage(Clear{}));
  EXPECT_EQ(decode_error(R"({"type":"tile","x":3})"), ErrorCode::field_out_of_range);
  EXPECT_EQ(decode_error(R"({"type":"tile","x":3,"y":4,"co)"), ErrorCode::malformed_frame);
  EXPECT_EQ(decode_error(""), ErrorCode::malformed_frame);
  EXPECT_EQ(decode_error("[1,2]"), ErrorCode::malformed_frame);
  EXPECT_EQ(decode_error(R"({"x":1})"), ErrorCode::malformed_frame);
  EXPECT_EQ(decode_error(R"({"type":"teleport"})"), ErrorCode::unknown_type);
  EXPECT_EQ(decode_error(R"({"type":"tile","x":3,"y":4,"code":10,"extra":1})"), ErrorCode::field_out_of_range);
  EXPECT_EQ(decode_error(R"({"type":"tile","x":3.5,"y":4,"code":10})"), ErrorCode::field_out_of_range);
  EXPECT_EQ(decode_error(R"({"type":"tile","x":"3","y":4,"code":10})"), ErrorCode::field_out_of_range);
  EXPECT_EQ(decode_error(R"({"type":"tile","x":18446744073709551615,"y":4,"code":10})"), ErrorCode::field_out_of_range);
  EXPECT_EQ(decode_error("{\"type\":\"clear\"}\n{\"type\":\"clear\"}"), ErrorCode::malformed_frame);
}

TEST(Session, RequiresHelloFirst) {
  SceneSession s;
  const auto ack = s.apply(Tile{0, 0, 1});
  EXPECT_EQ(ack.status, "error");
  EXPECT_EQ(ack.detail, "no session");
  EXPECT_EQ(s.apply(Commit{"x", std::nullopt}).detail, "no session");
  EXPECT_EQ(s.apply(Spawn{"car", 0, 0, 0}).detail, "no session");
}

TEST(Session, OneTileSceneDump) {
  testing_support::ScratchDir dir("session");
  SceneSession s(dir / "scene.json");
  EXPECT_TRUE(s.apply(Hello{kProtocolVersion, 4, 3, 2.0}).ok());
  EXPECT_EQ(s.apply(Tile{4, 0, 1}).detail, "tile out of bounds");
  EXPECT_TRUE(s.apply(Tile{2, 1, 0}).ok());
  EXPECT_TRUE(s.apply(Spawn{"car", 4.0, 2.0, 0.5}).ok());
  const auto ack = s.apply(Commit{"one", 1});
  EXPECT_TRUE(ack.ok()) << ack.detail;
  EXPECT_EQ(ack.ref, "commit");

  imaging::BinaryMask mask(4, 3);
  mask.set(2, 1);
  const auto dump = io::read_json(dir / "scene.json");
  EXPECT_EQ(tiles::tile_grid_from_json(dump), tiles::synthesize(mask));
  EXPECT_EQ(dump["scene_id"], "one");
  EXPECT_EQ(dump["tile_size"], 2.0);
  ASSERT_EQ(dump["agents"].size(), 1u);
  EXPECT_EQ(dump["agents"][0]["kind"], "car");
  EXPECT_EQ(dump["agents"][0]["heading"], 0.5);
}

TEST(Session, CommitIsIdempotentAndFreezes) {
  testing_support::ScratchDir dir("session");
  SceneSession s(dir / "scene.json");
  s.apply(Hello{kProtocolVersion, 5, 5, 1.0});
  s.apply(Tile{1, 1, 5});
  ASSERT_TRUE(s.apply(Commit{"a", std::nullopt}).ok());
  const auto first = io::read_file(dir / "scene.json");
  const auto again = s.apply(Commit{"a", std::nullopt});
  EXPECT_TRUE(again.ok());
  EXPECT_EQ(io::read_file(dir / "scene.json"), first);
  EXPECT_EQ(s.apply(Commit{"b", std::nullopt}).detail, "scene committed");
  EXPECT_EQ(s.apply(Tile{0, 0, 1}).detail, "scene committed");
  EXPECT_EQ(io::read_file(dir / "scene.json"), first);
  // Clear unfreezes and empties the grid but keeps its size
  EXPECT_TRUE(s.apply(Clear{}).ok());
  EXPECT_FALSE(s.state().committed);
  EXPECT_EQ(s.state().grid, TileGrid(5, 5));
  EXPECT_TRUE(s.apply(Tile{0, 0, 1}).ok());
}

TEST(Session, ChecksumMismatchLeavesNoDump) {
  testing_support::ScratchDir dir("session");
  SceneSession s(dir / "scene.json");
  s.apply(Hello{kProtocolVersion, 5, 5, 1.0});
  s.apply(Tile{1, 1, 5});
  const auto ack = s.apply(Commit{"a", 2});
  EXPECT_EQ(ack.status, "error");
  EXPECT_EQ(ack.detail, "tile count mismatch");
  EXPECT_FALSE(std::filesystem::exists(dir / "scene.json"));
  EXPECT_FALSE(s.state().committed);
}

TEST(Session, TileOrderDoesNotMatter) {
  std::mt19937_64 rng(41);
  const auto grid = random_grid(rng, 12, 9, 0.4);
  std::vector<Tile> tiles;
  for (std::size_t y = 0; y < 9; ++y) {
    for (std::size_t x = 0; x < 12; ++x) {
      if (grid.at(x, y) != tiles::kEmpty) tiles.push_back({std::int64_t(x), std::int64_t(y), grid.at(x, y)});
    }
  }
  for (int round = 0; round < 5; ++round) {
    std::shuffle(tiles.begin(), tiles.end(), rng);
    SceneSession s;
    s.apply(Hello{kProtocolVersion, 12, 9, 1.0});
    for (const auto& t : tiles) s.apply(t);
    ASSERT_TRUE(s.apply(Commit{"p", static_cast<std::int64_t>(tiles.size())}).ok());
    EXPECT_EQ(s.state().grid, grid);
  }
}

TEST(Session, FuzzedFramesOnlyProduceErrorAcks) {
  std::mt19937_64 rng(42);
  SceneSession s;
  s.apply(Hello{kProtocolVersion, 8, 8, 1.0});
  const std::vector<std::string> seeds{encode(Tile{1, 2, 3}), encode(Hello{1, 8, 8, 1.0}), encode(Commit{"z", 3})};
  int errors = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string frame;
    if (i % 2 == 0) {
      frame.resize(std::uniform_int_distribution<std::size_t>(0, 64)(rng));
      for (auto& c : frame) c = static_cast<char>(rng() & 0xff);
    } else {
      frame = seeds[i % seeds.size()];
      const auto flips = std::uniform_int_distribution<int>(1, 4)(rng);
      for (int f = 0; f < flips && !frame.empty(); ++f) {
        frame[std::uniform_int_distribution<std::size_t>(0, frame.size() - 1)(rng)] = static_cast<char>(rng() & 0xff);
      }
    }
    const auto ack = s.handle_frame(frame);
    if (!ack.ok()) ++errors;
  }
  EXPECT_GT(errors, 1500);
}

// Runs a server on an ephemeral port for the lifetime of the object.
class ServerThread {
 public:
  ServerThread(Transport transport, std::filesystem::path dump) {
    ServeOptions o;
    o.listen = {"127.0.0.1", 0};
    o.transport = transport;
    o.dump_path = std::move(dump);
    o.poll_interval_ms = 10;
    server_ = std::make_unique<SceneServer>(o);
    thread_ = std::thread([this] { server_->run(); });
  }
  ~ServerThread() {
    server_->stop();
    thread_.join();
  }
  Endpoint endpoint() const { return server_->endpoint(); }
  SceneServer& server() { return *server_; }

 private:
  std::unique_ptr<SceneServer> server_;
  std::thread thread_;
};

TEST(Loopback, StreamReproducesGrids) {
  testing_support::ScratchDir dir("loopback");
  ServerThread server(Transport::stream, dir / "scene.json");
  std::mt19937_64 rng(43);
  for (int i = 0; i < 5; ++i) {
    const auto grid = random_grid(rng, 1 + rng() % 40, 1 + rng() % 40, 0.3);
    const std::vector<Spawn> spawns{{"car", 1.5, 2.5, 0.25}};
    SendOptions o;
    o.scene_id = "s" + std::to_string(i);
    const auto summary = send_scene(grid, spawns, server.endpoint(), Transport::stream, o);
    EXPECT_TRUE(summary.final_ack.ok());
    EXPECT_EQ(summary.tiles_sent, grid.road_count());
    const auto dump = io::read_json(dir / "scene.json");
    EXPECT_EQ(tiles::tile_grid_from_json(dump), grid);
    EXPECT_EQ(dump["scene_id"], o.scene_id);
    EXPECT_EQ(dump["agents"].size(), 1u);
  }
}

TEST(Loopback, HundredCellsOnSixtyFourGrid) {
  testing_support::ScratchDir dir("loopback");
  ServerThread server(Transport::stream, dir / "scene.json");
  std::mt19937_64 rng(44);
  TileGrid grid(64, 64);
  std::vector<std::size_t> idx(64 * 64);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t i = 0; i < 100; ++i) grid.cells[idx[i]] = static_cast<int>(i % 16);
  send_scene(grid, {}, server.endpoint(), Transport::stream);
  const auto state = server.server().snapshot();
  EXPECT_EQ(state.grid, grid);
  EXPECT_EQ(state.tiles_received, 100u);
}

TEST(Loopback, EmptyGrid) {
  testing_support::ScratchDir dir("loopback");
  for (auto transport : {Transport::stream, Transport::datagram}) {
    ServerThread server(transport, dir / "scene.json");
    const auto summary = send_scene(TileGrid(6, 6), {}, server.endpoint(), transport);
    EXPECT_TRUE(summary.final_ack.ok());
    EXPECT_EQ(summary.final_ack.detail, "committed 0 tiles");
    EXPECT_EQ(tiles::load_tile_grid(dir / "scene.json"), TileGrid(6, 6));
  }
}

TEST(Loopback, DatagramWithoutLoss) {
  testing_support::ScratchDir dir("loopback");
  ServerThread server(Transport::datagram, dir / "scene.json");
  std::mt19937_64 rng(45);
  const auto grid = random_grid(rng, 48, 48, 0.5);
  const auto summary = send_scene(grid, {}, server.endpoint(), Transport::datagram);
  EXPECT_TRUE(summary.final_ack.ok());
  EXPECT_EQ(tiles::load_tile_grid(dir / "scene.json"), grid);
}

TEST(Loopback, DatagramLossIsDetected) {
  testing_support::ScratchDir dir("loopback");
  ServerThread server(Transport::datagram, dir / "scene.json");
  std::mt19937_64 rng(46);
  const auto grid = random_grid(rng, 40, 40, 0.5);
  SendOptions o;
  o.drop_rate = 0.1;
  o.seed = 7;
  try {
    send_scene(grid, {}, server.endpoint(), Transport::datagram, o);
    FAIL();
  } catch (const NackReceived& e) {
    EXPECT_EQ(e.code(), ErrorCode::nack_received);
    EXPECT_EQ(e.ack().detail, "tile count mismatch");
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "scene.json"));
  EXPECT_FALSE(server.server().snapshot().committed);
}

TEST(Loopback, StreamNackAndRefusal) {
  testing_support::ScratchDir dir("loopback");
  Endpoint closed;
  {
    ServerThread server(Transport::stream, dir / "scene.json");
    closed = server.endpoint();
    // the server's dump target is a directory, so Commit fails
    std::filesystem::create_directories(dir / "scene.json");
    try {
      send_scene(TileGrid(2, 2), {}, server.endpoint(), Transport::stream);
      FAIL();
    } catch (const NackReceived& e) {
      EXPECT_EQ(e.ack().ref, "commit");
      EXPECT_EQ(e.ack().detail.rfind("dump failed", 0), 0u) << e.ack().detail;
    }
  }
  try {
    send_scene(TileGrid(2, 2), {}, closed, Transport::stream);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::connection_refused);
  }
}

TEST(Loopback, StreamServerAnswersGarbage) {
  testing_support::ScratchDir dir("loopback");
  ServerThread server(Transport::stream, dir / "scene.json");
  auto fd = detail::connect_to(server.endpoint(), Transport::stream);
  const std::string junk = "not json\n{\"type\":\"tile\",\"x\":0,\"y\":0,\"code\":1}\n";
  ASSERT_EQ(::send(fd.get(), junk.data(), junk.size(), 0), static_cast<ssize_t>(junk.size()));
  std::string in;
  while (std::count(in.begin(), in.end(), '\n') < 2) {
    char buf[512];
    const auto n = ::recv(fd.get(), buf, sizeof buf, 0);
    ASSERT_GT(n, 0);
    in.append(buf, static_cast<std::size_t>(n));
  }
  const auto nl = in.find('\n');
  const auto first = detail::parse_ack(in.substr(0, nl));
  const auto second = detail::parse_ack(in.substr(nl + 1, in.find('\n', nl + 1) - nl - 1));
  EXPECT_EQ(first.ref, "frame");
  EXPECT_EQ(first.status, "error");
  EXPECT_EQ(second.detail, "no session");
}

TEST(Endpoints, Parsing) {
  EXPECT_EQ(parse_endpoint("10.0.0.2:9000").str(), "10.0.0.2:9000");
  EXPECT_EQ(parse_endpoint(":9000").port, 9000);
  EXPECT_EQ(parse_endpoint("9001").port, 9001);
  EXPECT_EQ(parse_endpoint("localhost").port, kDefaultPort);
  EXPECT_THROW(parse_endpoint("host:99999"), Error);
  EXPECT_EQ(parse_transport("udp"), Transport::datagram);
  EXPECT_EQ(parse_transport("stream"), Transport::stream);
  EXPECT_THROW(parse_transport("carrier-pigeon"), Error);
}

}  // namespace
