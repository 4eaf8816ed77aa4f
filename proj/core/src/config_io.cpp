#include "wzis/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wzis/error.hpp"

namespace wzis {
namespace {

using nlohmann::json;

std::vector<std::vector<double>> parse_matrix(const json& j, const char* field) {
  require(j.is_array(), ErrorCode::kConfigError, std::string(field) + " must be a list of rows");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) {
    require(row.is_array(), ErrorCode::kConfigError, std::string(field) + " rows must be lists");
    std::vector<double> r;
    for (const auto& v : row) {
      require(v.is_number(), ErrorCode::kConfigError, std::string(field) + " entries must be numbers");
      r.push_back(v.get<double>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

}  // namespace

ModelConfig parse_model_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfigError, std::string("config parse error: ") + e.what());
  }
  require(j.is_object(), ErrorCode::kConfigError, "config document must be an object");

  ModelConfig cfg;
  if (j.contains("alphabet_x")) cfg.alphabet_x = Alphabet(j["alphabet_x"].get<int>());
  if (j.contains("alphabet_y")) cfg.alphabet_y = Alphabet(j["alphabet_y"].get<int>());
  if (j.contains("alphabet_xhat")) cfg.alphabet_xhat = Alphabet(j["alphabet_xhat"].get<int>());
  if (j.contains("channel")) cfg.channel = validate_dmc(parse_matrix(j["channel"], "channel"));
  if (j.contains("distortion"))
    cfg.distortion = DistortionMatrix(parse_matrix(j["distortion"], "distortion"));
  if (j.contains("sequence")) {
    const auto& s = j["sequence"];
    require(s.is_array(), ErrorCode::kConfigError, "sequence must be a list of symbols");
    std::vector<int> syms;
    for (const auto& v : s) {
      require(v.is_number_integer(), ErrorCode::kConfigError, "sequence symbols must be integers");
      syms.push_back(v.get<int>());
    }
    int alpha = 0;
    if (cfg.alphabet_x) {
      alpha = cfg.alphabet_x->size;
    } else if (cfg.channel) {
      alpha = cfg.channel->input_size();
    } else {
      for (int v : syms) alpha = std::max(alpha, v + 1);
      if (alpha == 0) alpha = 1;
    }
    cfg.sequence = Sequence(std::move(syms), alpha);
  }
  if (cfg.channel && cfg.alphabet_x)
    require(cfg.channel->input_size() == cfg.alphabet_x->size, ErrorCode::kConfigError,
            "channel rows do not match alphabet_x");
  if (cfg.channel && cfg.alphabet_y)
    require(cfg.channel->output_size() == cfg.alphabet_y->size, ErrorCode::kConfigError,
            "channel columns do not match alphabet_y");
  if (cfg.distortion && cfg.alphabet_xhat)
    require(cfg.distortion->recon_size() == cfg.alphabet_xhat->size, ErrorCode::kConfigError,
            "distortion columns do not match alphabet_xhat");
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  return parse_model_config(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << content;
  require(out.good(), ErrorCode::kIoError, "write failed for " + path);
}

}  // namespace wzis
