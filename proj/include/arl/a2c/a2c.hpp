#pragma once

#include "arl/a2c/networks.hpp"
#include "arl/nnet/rmsprop.hpp"

#include <span>
#include <vector>

namespace arl::a2c {

struct Hyperparams {
  double gamma = 0.99;
  double beta = 1e-4;         // entropy coefficient
  double lr_actor = 1e-4;
  double lr_critic = 1e-2;
  nnet::RmsPropConfig rmsprop{0.9, 1e-10, 0.0};
  int rollout_steps = 32;     // n
  double variance_floor = 1e-4;
  ActorShape actor;
  CriticShape critic;

  void validate() const;
};

struct RolloutStep {
  Observation observation;  // normalized
  double action = 0.0;      // raw Gaussian sample u
  double reward = 0.0;
  double value = 0.0;       // V(s_t) at collection time
  double log_prob = 0.0;
  double entropy = 0.0;
  bool terminal = false;
};

/// One n-step window. `initial_state` is the actor's recurrent state before
/// the first step; gradients do not flow into it.
struct Rollout {
  nnet::RecurrentState initial_state;
  std::vector<RolloutStep> steps;
  double bootstrap_value = 0.0;  // V(s_{t+n}); 0 when the window ends the episode

  bool terminal() const { return !steps.empty() && steps.back().terminal; }
};

/// A_t = sum_{k<m} gamma^k r_{t+k} + gamma^m V_boot - V(s_t), m = steps to window end.
std::vector<double> n_step_advantages(const Rollout& rollout, double gamma);

/// mean_t (target_t - V(s_t))^2 with target_t = A_t + V_t held constant.
nnet::Var critic_loss(nnet::Tape& tape, const CriticNetwork& critic, const Rollout& rollout,
                      std::span<const double> advantages);

/// mean_t [-log pi(u_t | s_t) A_t - beta H(sigma^2_t)], A_t constant, with the
/// LSTM unrolled over the window from rollout.initial_state.
nnet::Var actor_loss(nnet::Tape& tape, const ActorNetwork& actor, const Rollout& rollout,
                     std::span<const double> advantages, double beta);

/// One RMSProp step on the respective loss; returns the loss before the step.
double critic_update(CriticNetwork& critic, nnet::RmsProp& opt, const Rollout& rollout,
                     std::span<const double> advantages, double learning_rate);
double actor_update(ActorNetwork& actor, nnet::RmsProp& opt, const Rollout& rollout,
                    std::span<const double> advantages, double beta, double learning_rate);

}  // namespace arl::a2c
