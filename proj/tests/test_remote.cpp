#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tocsin/remote.hpp"

using namespace tocsin;

namespace {

// Every scoring call reports that the model is not loaded.
class UnloadedBackend final : public Backend {
 public:
  std::string causal_model_id() const override { return "none"; }
  std::string seq2seq_model_id() const override { return "none"; }
  ScoredSequence causal_score(std::string_view, Wants) const override { throw fail(); }
  ScoredSequence conditional_score(std::string_view, std::string_view) const override { throw fail(); }
  ScoredSequence template_score(std::string_view, std::string_view) const override { throw fail(); }
  FastDetectStats fastdetect_stats(std::string_view, std::uint64_t, std::uint64_t) const override {
    throw fail();
  }

 private:
  static BackendUnavailable fail() { return BackendUnavailable("model not loaded"); }
};

class RemoteTest : public ::testing::Test {
 protected:
  void SetUp() override { server_.start(); }
  const ToyBackend& toy_ = fixtures::bundled_toy();
  ProtocolServer server_{toy_};
};

}  // namespace

TEST_F(RemoteTest, MatchesInProcessToyExactly) {
  RemoteBackend remote(server_.url());
  EXPECT_EQ(remote.causal_model_id(), "toy-bigram");
  EXPECT_EQ(remote.seq2seq_model_id(), "toy-copy-unigram");
  const auto corpus = fixtures::bundled_corpus();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& text = corpus.passages[i].text;
    const Wants all{.ranks = true, .entropies = true};
    EXPECT_EQ(remote.causal_score(text, all), toy_.causal_score(text, all));
    EXPECT_EQ(remote.causal_score(text, {}), toy_.causal_score(text, {}));
    const auto src = extract_prefix(text, 40);
    EXPECT_EQ(remote.conditional_score(src, text), toy_.conditional_score(src, text));
    EXPECT_EQ(remote.template_score(src, text), toy_.template_score(src, text));
    EXPECT_EQ(remote.fastdetect_stats(text, 200, 9), toy_.fastdetect_stats(text, 200, 9));
  }
}

TEST_F(RemoteTest, StatusCodes) {
  httplib::Client cli(server_.url());
  const auto post = [&](const char* path, const std::string& body) {
    const auto res = cli.Post(path, body, "application/json");
    return res ? res->status : -1;
  };
  EXPECT_EQ(post("/v1/score", "{not json"), 400);
  EXPECT_EQ(post("/v1/score", R"({"mode":"nope","target":"a"})"), 400);
  EXPECT_EQ(post("/v1/score", R"({"mode":"causal","target":"a","want":["bogus"]})"), 400);
  EXPECT_EQ(post("/v1/score", R"({"mode":"causal","target":"   "})"), 400);
  EXPECT_EQ(post("/v1/fastdetect", R"({"text":"a","n_samples":0,"seed":1})"), 400);
  EXPECT_EQ(post("/v1/score", R"({"mode":"causal","target":"a"})"), 200);

  std::string huge;
  for (int i = 0; i < 5000; ++i) huge += "w ";
  EXPECT_EQ(post("/v1/score", protocol::json{{"mode", "causal"}, {"target", huge}}.dump()), 413);

  const auto health = cli.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
}

TEST_F(RemoteTest, ClientMapsErrorStatuses) {
  RemoteBackend remote(server_.url());
  std::string huge;
  for (int i = 0; i < 5000; ++i) huge += "w ";
  EXPECT_THROW((void)remote.causal_score(huge, {}), ContextOverflow);
}

TEST(Remote, UnloadedModelIs503AndBackendUnavailable) {
  UnloadedBackend unloaded;
  ProtocolServer server(unloaded);
  server.start();
  httplib::Client cli(server.url());
  const auto res = cli.Post("/v1/score", R"({"mode":"seq2seq","source":"a","target":"b"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 503);
  RemoteBackend remote(server.url());
  EXPECT_THROW((void)remote.conditional_score("a", "b"), BackendUnavailable);
  EXPECT_THROW((void)remote.fastdetect_stats("a", 1, 1), BackendUnavailable);
}

TEST(Remote, UnreachableEndpoint) {
  // Bind and release a port so nothing listens there.
  int port = 0;
  {
    const ToyBackend& toy = fixtures::bundled_toy();
    ProtocolServer s(toy);
    port = s.start();
  }
  RemoteBackend remote("http://127.0.0.1:" + std::to_string(port));
  EXPECT_THROW((void)remote.causal_score("a b", {}), BackendUnavailable);
  EXPECT_THROW(RemoteBackend(""), ConfigError);
}

TEST(Protocol, RequestRoundTrip) {
  const protocol::ScoreRequest r{protocol::Mode::causal_template, "src", "tgt", {.ranks = true}};
  const auto back = protocol::decode_score_request(protocol::encode(r));
  EXPECT_EQ(back.mode, r.mode);
  EXPECT_EQ(back.source, r.source);
  EXPECT_EQ(back.target, r.target);
  EXPECT_TRUE(back.wants.ranks);
  EXPECT_FALSE(back.wants.entropies);

  const protocol::FastDetectRequest f{"t", 10, 0xFFFFFFFFFFFFFFFFULL};
  const auto fb = protocol::decode_fastdetect_request(protocol::encode(f));
  EXPECT_EQ(fb.seed, f.seed);
  EXPECT_EQ(fb.n_samples, 10u);
}

TEST(Protocol, InvalidResponsesAreBackendErrors) {
  EXPECT_THROW(protocol::decode_scored(protocol::json::parse(R"({"tokens":["a"],"logprobs":[0.5]})")),
               BackendError);
  EXPECT_THROW(protocol::decode_scored(protocol::json::parse(R"({"tokens":["a"]})")), BackendError);
  EXPECT_THROW(protocol::decode_stats(protocol::json::parse("{}"), 1, 1), BackendError);
}
