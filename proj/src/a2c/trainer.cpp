#include "arl/a2c/trainer.hpp"

#include <algorithm>

namespace arl::a2c {

Trainer::Trainer(env::EnvConfig env_config, targets::FollowerPolicy& follower, Hyperparams hyper,
                 std::uint64_t seed)
    : hyper_(hyper), rng_(seed), env_(env_config, follower) {
  hyper_.validate();
  actor_ = std::make_unique<ActorNetwork>(hyper_.actor, hyper_.variance_floor);
  critic_ = std::make_unique<CriticNetwork>(hyper_.critic);
  actor_->network().initialize(rng_);
  critic_->network().initialize(rng_);
  actor_opt_ = std::make_unique<nnet::RmsProp>(actor_->network().parameters(), hyper_.rmsprop);
  critic_opt_ = std::make_unique<nnet::RmsProp>(critic_->network().parameters(), hyper_.rmsprop);
  state_ = actor_->initial_state();
}

env::AdversaryObservation Trainer::begin_episode() {
  state_ = actor_->initial_state();
  trace_.clear();
  return env_.reset(rng_);
}

EpisodeRecord Trainer::run_episode(EpisodeObserver* observer) {
  EpisodeRecord rec;
  rec.episode = episode_;
  env::AdversaryObservation obs = begin_episode();
  rec.cof = env_.world().cof;
  rec.min_headway = obs.t_h;

  const double dt = env_.config().sim.dt;
  bool done = false;
  while (!done) {
    Rollout rollout;
    rollout.initial_state = state_;
    rollout.steps.reserve(static_cast<std::size_t>(hyper_.rollout_steps));
    for (int k = 0; k < hyper_.rollout_steps && !done; ++k) {
      const Observation x = env::normalize_obs(obs);
      const PolicyOutput policy = actor_->forward(x, state_);
      const double u = sample_action(policy, rng_);
      const double v = critic_->value(x);
      const env::StepOutcome out = env_.step(u);

      rollout.steps.push_back({x, u, out.reward, v, log_prob(policy.mean, policy.variance, u),
                               entropy(policy.variance), out.done});
      rec.total_reward += out.reward;
      rec.min_headway = std::min(rec.min_headway, out.observation.t_h);
      ++rec.steps;
      if (record_traces_) {
        const long step = env_.world().step_index;
        trace_.push_back({step, static_cast<double>(step) * dt, out.info, out.reward});
      }
      if (out.done && out.done_reason == env::DoneReason::collision) {
        rec.collision = true;
        rec.collision_step = env_.world().step_index;
      }
      done = out.done;
      obs = out.observation;
    }
    rollout.bootstrap_value = done ? 0.0 : critic_->value(env::normalize_obs(obs));
    const std::vector<double> adv = n_step_advantages(rollout, hyper_.gamma);
    critic_update(*critic_, *critic_opt_, rollout, adv, hyper_.lr_critic);
    actor_update(*actor_, *actor_opt_, rollout, adv, hyper_.beta, hyper_.lr_actor);
  }
  ++episode_;
  if (observer) observer->on_episode(rec, trace_, *actor_);
  return rec;
}

RunLog Trainer::train(long episodes, EpisodeObserver* observer) {
  RunLog log;
  log.episodes.reserve(static_cast<std::size_t>(std::max(0L, episodes)));
  for (long e = 0; e < episodes; ++e) log.episodes.push_back(run_episode(observer));
  return log;
}

TrainResult train_run(const env::EnvConfig& env_config, targets::FollowerPolicy& follower,
                      const Hyperparams& hyper, std::uint64_t seed, long episodes,
                      EpisodeObserver* observer, bool record_traces) {
  Trainer trainer(env_config, follower, hyper, seed);
  trainer.set_record_traces(record_traces);
  TrainResult result;
  result.log = trainer.train(episodes, observer);
  result.actor = std::make_unique<ActorNetwork>(trainer.actor());
  return result;
}

}  // namespace arl::a2c
