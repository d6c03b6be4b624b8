#include "arl/a2c/a2c.hpp"

#include "arl/error.hpp"

#include <cmath>

namespace arl::a2c {

void Hyperparams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("a2c.gamma must lie in [0, 1]");
  if (!(beta >= 0.0)) throw ConfigError("a2c.beta must be non-negative");
  if (!(lr_actor > 0.0)) throw ConfigError("a2c.lr_actor must be positive");
  if (!(lr_critic > 0.0)) throw ConfigError("a2c.lr_critic must be positive");
  if (!(rmsprop.decay > 0.0 && rmsprop.decay < 1.0))
    throw ConfigError("a2c.rmsprop_decay must lie in (0, 1)");
  if (!(rmsprop.epsilon > 0.0)) throw ConfigError("a2c.rmsprop_epsilon must be positive");
  if (!(rmsprop.momentum >= 0.0)) throw ConfigError("a2c.rmsprop_momentum must be non-negative");
  if (rollout_steps < 1) throw ConfigError("a2c.rollout_steps must be at least 1");
  if (!(variance_floor > 0.0)) throw ConfigError("a2c.variance_floor must be positive");
  if (actor.hidden_layers < 1 || actor.hidden_units < 1 || actor.lstm_units < 1)
    throw ConfigError("a2c actor layer sizes must be positive");
  if (critic.hidden_layers < 1 || critic.hidden_units < 1)
    throw ConfigError("a2c critic layer sizes must be positive");
}

std::vector<double> n_step_advantages(const Rollout& rollout, double gamma) {
  std::vector<double> adv(rollout.steps.size());
  double ret = rollout.terminal() ? 0.0 : rollout.bootstrap_value;
  for (std::size_t k = rollout.steps.size(); k-- > 0;) {
    ret = rollout.steps[k].reward + gamma * ret;
    adv[k] = ret - rollout.steps[k].value;
  }
  return adv;
}

nnet::Var critic_loss(nnet::Tape& tape, const CriticNetwork& critic, const Rollout& rollout,
                      std::span<const double> advantages) {
  if (advantages.size() != rollout.steps.size() || rollout.steps.empty())
    throw UsageError("critic_loss: advantages must align with a non-empty rollout");
  std::vector<nnet::Var> terms;
  terms.reserve(rollout.steps.size());
  for (std::size_t t = 0; t < rollout.steps.size(); ++t) {
    const auto& s = rollout.steps[t];
    const nnet::Var target = tape.scalar(advantages[t] + s.value);
    terms.push_back(tape.square(tape.sub(target, critic.value(tape, s.observation))));
  }
  return tape.mean(terms);
}

nnet::Var actor_loss(nnet::Tape& tape, const ActorNetwork& actor, const Rollout& rollout,
                     std::span<const double> advantages, double beta) {
  if (advantages.size() != rollout.steps.size() || rollout.steps.empty())
    throw UsageError("actor_loss: advantages must align with a non-empty rollout");
  nnet::Var hidden = tape.constant(rollout.initial_state.hidden);
  nnet::Var cell = tape.constant(rollout.initial_state.cell);
  std::vector<nnet::Var> terms;
  terms.reserve(rollout.steps.size());
  for (std::size_t t = 0; t < rollout.steps.size(); ++t) {
    const auto& s = rollout.steps[t];
    const auto out = actor.forward(tape, s.observation, hidden, cell);
    hidden = out.hidden;
    cell = out.cell;
    const nnet::Var lp = tape.gaussian_log_prob(out.mean, out.variance, s.action);
    const nnet::Var h = tape.gaussian_entropy(out.variance);
    terms.push_back(tape.add(tape.scale(lp, -advantages[t]), tape.scale(h, -beta)));
  }
  return tape.mean(terms);
}

double critic_update(CriticNetwork& critic, nnet::RmsProp& opt, const Rollout& rollout,
                     std::span<const double> advantages, double learning_rate) {
  nnet::Tape tape;
  const nnet::Var loss = critic_loss(tape, critic, rollout, advantages);
  opt.step(tape.backward(loss), learning_rate);
  return tape.scalar_value(loss);
}

double actor_update(ActorNetwork& actor, nnet::RmsProp& opt, const Rollout& rollout,
                    std::span<const double> advantages, double beta, double learning_rate) {
  nnet::Tape tape;
  const nnet::Var loss = actor_loss(tape, actor, rollout, advantages, beta);
  opt.step(tape.backward(loss), learning_rate);
  return tape.scalar_value(loss);
}

}  // namespace arl::a2c
