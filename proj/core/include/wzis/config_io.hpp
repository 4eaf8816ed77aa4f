#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wzis/model.hpp"

namespace wzis {

// Model objects parsed from a plain-text config document (JSON). Recognized
// fields: alphabet_x, alphabet_y, alphabet_xhat, channel, distortion,
// sequence. Absent fields stay disengaged.
struct ModelConfig {
  std::optional<Alphabet> alphabet_x;
  std::optional<Alphabet> alphabet_y;
  std::optional<Alphabet> alphabet_xhat;
  std::optional<Channel> channel;
  std::optional<DistortionMatrix> distortion;
  std::optional<Sequence> sequence;
};

ModelConfig parse_model_config(const std::string& text);
ModelConfig load_model_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wzis
