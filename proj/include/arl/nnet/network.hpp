#pragma once

#include "arl/error.hpp"
#include "arl/nnet/layers.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace arl::nnet {

using Layer = std::variant<DenseLayer, LstmCell>;

/// Ordered collection of layers plus the descriptor used by the weight file.
/// Topology (which layer feeds which) is decided by the owner; `run_sequential`
/// covers the plain chain case.
class Network {
 public:
  Network() = default;

  Network& add(Layer layer);

  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return layers_.at(i); }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }

  template <class T>
  T& as(std::size_t i) {
    return std::get<T>(layers_.at(i));
  }
  template <class T>
  const T& as(std::size_t i) const {
    return std::get<T>(layers_.at(i));
  }

  /// e.g. "dense:4:50:relu6,lstm:50:16,dense:16:1:tanh"
  std::string architecture() const;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  void initialize(std::mt19937_64& rng);

  /// Zero state for every LSTM layer in order.
  std::vector<RecurrentState> initial_states() const;

  /// Applies the layers as a chain; `states` must come from initial_states().
  Vector run_sequential(const Vector& input, std::vector<RecurrentState>& states) const;

  int input_size() const;
  int output_size() const;

 private:
  std::vector<Layer> layers_;
};

/// Builds an all-zero network from an architecture descriptor. Layer names
/// follow the "layer<k>" convention used by the weight file.
Network network_from_architecture(const std::string& descriptor);

/// Thrown by the weight loader; the message names the offending line or field.
class WeightFileError : public IoError {
 public:
  using IoError::IoError;
};

void save_weights(const Network& net, const std::filesystem::path& path);
/// Reconstructs the network from the descriptor stored in the file.
Network load_weights(const std::filesystem::path& path);
/// Loads into an existing network; the file's architecture must match exactly.
void load_weights_into(const std::filesystem::path& path, Network& net);

}  // namespace arl::nnet
