#include "wifimec/dqn.hpp"

#include <doctest.h>

#include <string>

using namespace wifimec;

TEST_CASE("joint action encoding") {
  CHECK(encode_action(Action{1, 0, 0}) == 1);
  CHECK(encode_action(Action{0, 0, 1}) == 4);
  CHECK(decode_action(6, 3) == Action{0, 1, 1});
  for (int i = 0; i < 64; ++i) CHECK(encode_action(decode_action(i, 6)) == i);
}

TEST_CASE("action space bound") {
  DqnHyperparams hp;
  hp.hidden_width = 8;
  try {
    DqnAgent agent(4, 13, hp, 1);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("joint action space too large") != std::string::npos);
  }
  DqnAgent one(2, 1, hp, 1);
  CHECK(one.joint_actions() == 2);
  CHECK(one.q_net().output_dim() == 2);
  CHECK(one.decide(Vector::Random(2)).size() == 1);
  DqnAgent five(14, 5, hp, 1);
  CHECK(five.q_net().output_dim() == 32);
  CHECK(five.target_net().flat() == five.q_net().flat());
}

TEST_CASE("greedy action and updates") {
  DqnHyperparams hp;
  hp.hidden_width = 16;
  hp.target_sync = 2;
  DqnAgent agent(3, 2, hp, 5);
  const Vector s = Vector::Random(3);
  const Matrix q = agent.q_net().forward(s);
  Eigen::Index best = 0;
  q.col(0).maxCoeff(&best);
  CHECK(encode_action(agent.decide(s)) == best);
  CHECK(agent.act(s, 0.0) == agent.decide(s));

  Batch b;
  b.states = Matrix::Random(3, 4);
  b.actions = Matrix::Zero(2, 4);
  b.actions(0, 1) = 1;
  b.rewards = Vector::Ones(4);
  b.next_states = Matrix::Random(3, 4);
  b.dones = Vector::Zero(4);
  const Vector before = agent.q_net().flat();
  agent.update(b);
  CHECK(agent.q_net().flat() != before);
  CHECK(agent.target_net().flat() != agent.q_net().flat());
  agent.update(b);
  CHECK(agent.updates() == 2);
  CHECK(agent.target_net().flat() == agent.q_net().flat());
}
