#include <gtest/gtest.h>

#include <filesystem>

#include "l2e/config.hpp"
#include "l2e/text.hpp"

using namespace l2e;

TEST(Config, DefaultsRoundTripThroughText) {
  const ExperimentConfig d;
  const ExperimentConfig back = ExperimentConfig::parse(d.text());
  EXPECT_EQ(back.text(), d.text());
  EXPECT_EQ(back.hash(), d.hash());
  EXPECT_EQ(d.hash().size(), 16u);
}

TEST(Config, ParsesEveryKindOfValue) {
  const ExperimentConfig c = ExperimentConfig::parse(R"(
# comment line
experiment.method = her   # trailing comment
experiment.env = maze
experiment.total_steps = 1500000
replay.strategy = uniform
replay.n = 4
her.strategy = episode
her.k = 3
learner.hidden = 32, 16
learner.entropy_target = -1.5
learner.learn_alpha = no
env.noise = false
)");
  EXPECT_EQ(c.method, Method::Her);
  EXPECT_EQ(c.env.task, Task::Maze);
  EXPECT_EQ(c.total_steps, 1'500'000);
  EXPECT_EQ(c.replay, ReplayStrategy::Uniform);
  EXPECT_EQ(c.replay_n, 4u);
  EXPECT_EQ(c.her_strategy, HerStrategy::Episode);
  EXPECT_EQ(c.her_k, 3);
  EXPECT_EQ(c.learner.hidden, (std::vector<int>{32, 16}));
  EXPECT_EQ(c.learner.entropy_target, -1.5);
  EXPECT_FALSE(c.learner.learn_alpha);
  EXPECT_FALSE(c.env.noise);
  EXPECT_EQ(c.display_label(), "her");
  EXPECT_EQ(ExperimentConfig::parse(c.text()).text(), c.text());
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
  try {
    ExperimentConfig::parse("replay.n = 3\nreplay.colour = red\n");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(ExperimentConfig::parse("replay.n = three\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("experiment.method = dqn\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("replay.n = 20\nreplay.m = 10\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("experiment.env = maze\nplan.density = 12\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("experiment.env = maze\nexperiment.method = plan_im\n"),
               std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("learner.gamma = 1\n"), std::invalid_argument);
  EXPECT_THROW(ExperimentConfig::parse("no equals sign\n"), std::invalid_argument);
}

TEST(Config, HashTracksContent) {
  ExperimentConfig a, b;
  b.sigma = 0.25;
  EXPECT_NE(a.hash(), b.hash());
  b.sigma = 0.5;
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(Config, ShippedConfigsLoad) {
  const std::filesystem::path dir = std::filesystem::path(L2E_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW(ExperimentConfig::load(entry.path())) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 8);
}

TEST(Text, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, 3e-4, -2.5e-300, 1e308}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
  EXPECT_EQ(parse_int_list(" 1, 2 ,3 "), (std::vector<int>{1, 2, 3}));
  EXPECT_TRUE(parse_bool("on"));
  EXPECT_THROW(parse_bool("maybe"), std::invalid_argument);
}
