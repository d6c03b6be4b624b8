#include "arl/nnet/network.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace arl::nnet {

namespace {

constexpr const char* kFormatTag = "NNETv1";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

int parse_size(const std::string& token, const std::string& context) {
  int value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || value <= 0)
    throw WeightFileError(context + ": invalid size '" + token + "'");
  return value;
}

std::string describe(const Layer& layer) {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    return "dense:" + std::to_string(d->in_size()) + ":" + std::to_string(d->out_size()) + ":" +
           std::string(to_string(d->activation));
  }
  const auto& l = std::get<LstmCell>(layer);
  return "lstm:" + std::to_string(l.input_size()) + ":" + std::to_string(l.hidden_size());
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Network& Network::add(Layer layer) {
  layers_.push_back(std::move(layer));
  return *this;
}

std::string Network::architecture() const {
  std::string out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (i) out += ',';
    out += describe(layers_[i]);
  }
  return out;
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers_) {
    if (auto* d = std::get_if<DenseLayer>(&layer)) {
      out.push_back(&d->weights);
      out.push_back(&d->biases);
    } else {
      auto& l = std::get<LstmCell>(layer);
      out.push_back(&l.input_weights);
      out.push_back(&l.recurrent_weights);
      out.push_back(&l.biases);
    }
  }
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  auto mutable_params = const_cast<Network*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

void Network::initialize(std::mt19937_64& rng) {
  for (auto& layer : layers_) std::visit([&](auto& l) { l.initialize(rng); }, layer);
}

std::vector<RecurrentState> Network::initial_states() const {
  std::vector<RecurrentState> states;
  for (const auto& layer : layers_)
    if (const auto* l = std::get_if<LstmCell>(&layer))
      states.push_back(RecurrentState::zeros(l->hidden_size()));
  return states;
}

Vector Network::run_sequential(const Vector& input, std::vector<RecurrentState>& states) const {
  Vector x = input;
  std::size_t next_state = 0;
  for (const auto& layer : layers_) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      x = dense_forward(*d, x);
    } else {
      if (next_state >= states.size()) throw ConfigError("missing recurrent state for lstm layer");
      x = lstm_step(std::get<LstmCell>(layer), x, states[next_state++]);
    }
  }
  return x;
}

int Network::input_size() const {
  if (layers_.empty()) return 0;
  return std::visit(
      [](const auto& l) {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, DenseLayer>)
          return l.in_size();
        else
          return l.input_size();
      },
      layers_.front());
}

int Network::output_size() const {
  if (layers_.empty()) return 0;
  return std::visit(
      [](const auto& l) {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, DenseLayer>)
          return l.out_size();
        else
          return l.hidden_size();
      },
      layers_.back());
}

Network network_from_architecture(const std::string& descriptor) {
  Network net;
  const auto items = split(descriptor, ',');
  if (items.empty()) throw WeightFileError("architecture: empty descriptor");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string name = "layer" + std::to_string(i);
    const std::string context = "architecture item " + std::to_string(i) + " '" + items[i] + "'";
    const auto fields = split(items[i], ':');
    if (fields.size() == 4 && fields[0] == "dense") {
      Activation act;
      try {
        act = parse_activation(fields[3]);
      } catch (const ConfigError& e) {
        throw WeightFileError(context + ": " + e.what());
      }
      net.add(DenseLayer(name, parse_size(fields[1], context), parse_size(fields[2], context), act));
    } else if (fields.size() == 3 && fields[0] == "lstm") {
      net.add(LstmCell(name, parse_size(fields[1], context), parse_size(fields[2], context)));
    } else {
      throw WeightFileError(context + ": expected dense:IN:OUT:ACT or lstm:IN:HIDDEN");
    }
  }
  return net;
}

void save_weights(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kFormatTag << '\n' << net.architecture() << '\n';
  for (const Parameter* p : net.parameters()) {
    out << p->name << ' ' << p->value.size();
    for (Eigen::Index r = 0; r < p->value.rows(); ++r)
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) out << ' ' << format_value(p->value(r, c));
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

void read_blocks(std::istream& in, Network& net, const std::string& source) {
  int line_no = 2;
  for (Parameter* p : net.parameters()) {
    ++line_no;
    std::string line;
    if (!std::getline(in, line))
      throw WeightFileError(source + ": truncated file, missing parameter block '" + p->name +
                            "' (line " + std::to_string(line_no) + ")");
    std::istringstream ls(line);
    std::string name;
    long long count = -1;
    ls >> name >> count;
    if (name != p->name)
      throw WeightFileError(source + ": line " + std::to_string(line_no) + ": expected block '" +
                            p->name + "', found '" + name + "'");
    if (count != p->value.size())
      throw WeightFileError(source + ": block '" + p->name + "' declares " + std::to_string(count) +
                            " values, architecture requires " + std::to_string(p->value.size()));
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        std::string token;
        if (!(ls >> token))
          throw WeightFileError(source + ": block '" + p->name + "' is truncated");
        double v = 0.0;
        const auto* end = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc{} || ptr != end)
          throw WeightFileError(source + ": block '" + p->name + "': bad value '" + token + "'");
        p->value(r, c) = v;
      }
    }
    std::string extra;
    if (ls >> extra)
      throw WeightFileError(source + ": block '" + p->name + "' has trailing values");
  }
}

std::string read_header(std::istream& in, const std::string& source) {
  std::string tag;
  if (!std::getline(in, tag) || tag != kFormatTag)
    throw WeightFileError(source + ": line 1: expected format tag " + std::string(kFormatTag));
  std::string arch;
  if (!std::getline(in, arch) || arch.empty())
    throw WeightFileError(source + ": line 2: missing architecture descriptor");
  return arch;
}

}  // namespace

Network load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string source = path.string();
  Network net = network_from_architecture(read_header(in, source));
  read_blocks(in, net, source);
  return net;
}

void load_weights_into(const std::filesystem::path& path, Network& net) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string source = path.string();
  const std::string arch = read_header(in, source);
  if (arch != net.architecture()) {
    const auto got = split(arch, ',');
    const auto want = split(net.architecture(), ',');
    for (std::size_t i = 0; i < std::max(got.size(), want.size()); ++i) {
      const std::string g = i < got.size() ? got[i] : "<none>";
      const std::string w = i < want.size() ? want[i] : "<none>";
      if (g != w)
        throw WeightFileError(source + ": dimension mismatch at layer " + std::to_string(i) +
                              ": file declares '" + g + "', network expects '" + w + "'");
    }
  }
  // stage so a failed load leaves `net` untouched; copy values so that
  // external pointers into `net` (optimizers) stay valid
  Network staged = net;
  read_blocks(in, staged, source);
  auto dst = net.parameters();
  auto src = staged.parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value;
}

}  // namespace arl::nnet
