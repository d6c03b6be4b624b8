#pragma once

#include "arl/a2c/a2c.hpp"
#include "arl/env/adversary_env.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace arl::a2c {

struct EpisodeRecord {
  long episode = 0;  // 0-based
  double cof = 0.0;
  double min_headway = 0.0;
  double total_reward = 0.0;
  long steps = 0;
  bool collision = false;
  std::optional<long> collision_step;  // step index at which the gap closed
};

/// One row of a per-step trace, recorded after the step.
struct TraceRow {
  long step = 0;
  double t_s = 0.0;
  env::StepInfo info;
  double reward = 0.0;
};

struct RunLog {
  std::vector<EpisodeRecord> episodes;
};

/// Receives each finished episode. `trace` is empty unless the trainer was
/// asked to record traces.
class EpisodeObserver {
 public:
  virtual ~EpisodeObserver() = default;
  virtual void on_episode(const EpisodeRecord& record, std::span<const TraceRow> trace,
                          const ActorNetwork& actor) = 0;
};

/// Synchronous single-worker A2C against one follower. Not copyable: the
/// optimizers hold pointers into the networks.
class Trainer {
 public:
  Trainer(env::EnvConfig env_config, targets::FollowerPolicy& follower, Hyperparams hyper,
          std::uint64_t seed);
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// Resets the environment and zeroes the actor's recurrent state.
  env::AdversaryObservation begin_episode();
  EpisodeRecord run_episode(EpisodeObserver* observer = nullptr);
  RunLog train(long episodes, EpisodeObserver* observer = nullptr);

  void set_record_traces(bool on) { record_traces_ = on; }

  const ActorNetwork& actor() const { return *actor_; }
  const CriticNetwork& critic() const { return *critic_; }
  ActorNetwork& actor() { return *actor_; }
  CriticNetwork& critic() { return *critic_; }
  const nnet::RecurrentState& recurrent_state() const { return state_; }
  long episodes_done() const { return episode_; }

 private:
  Hyperparams hyper_;
  std::mt19937_64 rng_;
  env::AdversaryEnv env_;
  std::unique_ptr<ActorNetwork> actor_;
  std::unique_ptr<CriticNetwork> critic_;
  std::unique_ptr<nnet::RmsProp> actor_opt_;
  std::unique_ptr<nnet::RmsProp> critic_opt_;
  nnet::RecurrentState state_;
  long episode_ = 0;
  bool record_traces_ = false;
  std::vector<TraceRow> trace_;
};

struct TrainResult {
  std::unique_ptr<ActorNetwork> actor;
  RunLog log;
};

/// Deterministic in (config, follower, hyper, seed).
TrainResult train_run(const env::EnvConfig& env_config, targets::FollowerPolicy& follower,
                      const Hyperparams& hyper, std::uint64_t seed, long episodes,
                      EpisodeObserver* observer = nullptr, bool record_traces = false);

}  // namespace arl::a2c
