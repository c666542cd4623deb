#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/tensor.hpp"

namespace fampe::model {

enum class LayerKind { dense, conv2d, relu, flatten, avgpool2d };

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  // dense: in, out.  conv2d: in = in_ch, out = out_ch, kernel, stride, pad.
  // avgpool2d: kernel.
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t pad = 0;

  static LayerSpec dense(std::size_t in, std::size_t out) { return {LayerKind::dense, in, out, 0, 1, 0}; }
  static LayerSpec conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t k, std::size_t stride = 1,
                          std::size_t pad = 0) {
    return {LayerKind::conv2d, in_ch, out_ch, k, stride, pad};
  }
  static LayerSpec relu() { return {LayerKind::relu}; }
  static LayerSpec flatten() { return {LayerKind::flatten}; }
  static LayerSpec avgpool2d(std::size_t k) { return {LayerKind::avgpool2d, 0, 0, k, k, 0}; }

  bool has_parameters() const { return kind == LayerKind::dense || kind == LayerKind::conv2d; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

inline Shape layer_output_shape(const LayerSpec& layer, const Shape& in, std::size_t index) {
  const auto fail = [&](const std::string& why) {
    return Error(errc::shape_mismatch, "layer " + std::to_string(index) + ": " + why + " (input " + shape_string(in) + ")");
  };
  switch (layer.kind) {
  case LayerKind::dense:
    if (shape_size(in) != layer.in) throw fail("dense expects " + std::to_string(layer.in) + " inputs");
    return {layer.out};
  case LayerKind::conv2d: {
    if (in.size() != 3 || in[0] != layer.in) throw fail("conv2d expects " + std::to_string(layer.in) + " input channels");
    if (layer.kernel == 0 || layer.stride == 0) throw fail("conv2d kernel and stride must be positive");
    if (in[1] + 2 * layer.pad < layer.kernel || in[2] + 2 * layer.pad < layer.kernel) throw fail("conv2d kernel larger than padded input");
    return {layer.out, (in[1] + 2 * layer.pad - layer.kernel) / layer.stride + 1,
            (in[2] + 2 * layer.pad - layer.kernel) / layer.stride + 1};
  }
  case LayerKind::relu:
    return in;
  case LayerKind::flatten:
    return {shape_size(in)};
  case LayerKind::avgpool2d:
    if (in.size() != 3) throw fail("avgpool2d expects a CxHxW input");
    if (layer.kernel == 0 || in[1] < layer.kernel || in[2] < layer.kernel) throw fail("avgpool2d kernel does not fit");
    return {in[0], in[1] / layer.kernel, in[2] / layer.kernel};
  }
  throw fail("unknown layer kind");
}

/// Ordered layer list with a fixed input shape.
struct ModelSpec {
  Shape input_shape;
  std::vector<LayerSpec> layers;

  /// Shapes flowing between layers; element i is the input of layer i, the
  /// last element is the logit shape.
  std::vector<Shape> activation_shapes() const {
    if (input_shape.empty()) throw Error(errc::invalid_argument, "model spec has no input shape");
    std::vector<Shape> shapes{input_shape};
    for (std::size_t i = 0; i < layers.size(); ++i) shapes.push_back(layer_output_shape(layers[i], shapes.back(), i));
    return shapes;
  }

  std::size_t class_count() const {
    const Shape out = activation_shapes().back();
    if (out.size() != 1) throw Error(errc::shape_mismatch, "model output must be a vector, got " + shape_string(out));
    return out[0];
  }

  void validate() const {
    if (layers.empty()) throw Error(errc::invalid_argument, "model spec has no layers");
    if (class_count() < 1) throw Error(errc::invalid_argument, "model spec must produce at least one class");
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Text form, one directive per line:
//   input C H W
//   conv2d IN_CH OUT_CH KERNEL [STRIDE [PAD]]
//   relu | flatten | avgpool2d K | dense IN OUT
// '#' starts a comment.
inline ModelSpec parse_model_spec(const std::string& text) {
  ModelSpec spec;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string op;
    if (!(words >> op)) continue;
    std::vector<std::size_t> args;
    for (long long v; words >> v;) {
      if (v < 0) throw Error(errc::format, "model spec line " + std::to_string(line_no) + ": negative value");
      args.push_back(static_cast<std::size_t>(v));
    }
    if (!words.eof()) throw Error(errc::format, "model spec line " + std::to_string(line_no) + ": non-numeric argument");
    const auto need = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) {
        throw Error(errc::format, "model spec line " + std::to_string(line_no) + ": wrong argument count for '" + op + "'");
      }
    };
    if (op == "input") {
      need(1, 3);
      spec.input_shape = args;
    } else if (op == "dense") {
      need(2, 2);
      spec.layers.push_back(LayerSpec::dense(args[0], args[1]));
    } else if (op == "conv2d") {
      need(3, 5);
      spec.layers.push_back(LayerSpec::conv2d(args[0], args[1], args[2], args.size() > 3 ? args[3] : 1,
                                              args.size() > 4 ? args[4] : 0));
    } else if (op == "relu") {
      need(0, 0);
      spec.layers.push_back(LayerSpec::relu());
    } else if (op == "flatten") {
      need(0, 0);
      spec.layers.push_back(LayerSpec::flatten());
    } else if (op == "avgpool2d") {
      need(1, 1);
      spec.layers.push_back(LayerSpec::avgpool2d(args[0]));
    } else {
      throw Error(errc::format, "model spec line " + std::to_string(line_no) + ": unknown layer '" + op + "'");
    }
  }
  spec.validate();
  return spec;
}

inline std::string format_model_spec(const ModelSpec& spec) {
  std::ostringstream os;
  os << "input";
  for (auto d : spec.input_shape) os << ' ' << d;
  os << '\n';
  for (const auto& l : spec.layers) {
    switch (l.kind) {
    case LayerKind::dense: os << "dense " << l.in << ' ' << l.out; break;
    case LayerKind::conv2d: os << "conv2d " << l.in << ' ' << l.out << ' ' << l.kernel << ' ' << l.stride << ' ' << l.pad; break;
    case LayerKind::relu: os << "relu"; break;
    case LayerKind::flatten: os << "flatten"; break;
    case LayerKind::avgpool2d: os << "avgpool2d " << l.kernel; break;
    }
    os << '\n';
  }
  return os.str();
}

inline ModelSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::not_found, "cannot open model spec '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_spec(buf.str());
}

/// Small CNN used for the synthetic shapes dataset.
inline ModelSpec shapes_cnn(std::size_t channels, std::size_t height, std::size_t width, std::size_t classes) {
  ModelSpec spec;
  spec.input_shape = {channels, height, width};
  spec.layers = {LayerSpec::conv2d(channels, 8, 5, 2, 2), LayerSpec::relu(), LayerSpec::avgpool2d(2), LayerSpec::flatten()};
  const Shape pooled = spec.activation_shapes().back();
  spec.layers.push_back(LayerSpec::dense(shape_size(pooled), classes));
  return spec;
}

} // namespace fampe::model
