#include "discdyn/response_models.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "discdyn/errors.hpp"

namespace discdyn {

void validate(const FopdtModel& model) {
  if (!std::isfinite(model.gain) || !std::isfinite(model.time_constant) ||
      !std::isfinite(model.dead_time)) {
    raise(Errc::invalid_argument, "FOPDT model has non-finite parameters");
  }
  if (model.gain < 0.0) {
    raise(Errc::invalid_argument, "FOPDT gain must be >= 0");
  }
  if (model.time_constant <= 0.0) {
    raise(Errc::invalid_argument, "FOPDT time constant must be > 0");
  }
  if (model.dead_time < 0.0) {
    raise(Errc::invalid_argument, "FOPDT dead time must be >= 0");
  }
}

double fopdt_step_response(const FopdtModel& model, double t) {
  if (t <= model.dead_time) return 0.0;
  return model.gain * -std::expm1(-(t - model.dead_time) / model.time_constant);
}

double fopdt_rate(const FopdtModel& model, double t) {
  if (t < model.dead_time) return 0.0;
  return model.gain / model.time_constant *
         std::exp(-(t - model.dead_time) / model.time_constant);
}

void validate(const LogisticModel& model) {
  if (!std::isfinite(model.scale) || !std::isfinite(model.rate) ||
      !std::isfinite(model.initial_fraction)) {
    raise(Errc::invalid_argument, "logistic model has non-finite parameters");
  }
  if (model.scale < 0.0) {
    raise(Errc::invalid_argument, "logistic scale must be >= 0");
  }
  if (!(model.initial_fraction > 0.0 && model.initial_fraction < 1.0)) {
    raise(Errc::invalid_argument,
          "logistic initial fraction must lie strictly inside (0, 1)");
  }
}

double logistic_fraction(const LogisticModel& model, double t) {
  return sigmoid(model.rate * t + logit(model.initial_fraction));
}

double logistic_value(const LogisticModel& model, double t) {
  return model.scale * logistic_fraction(model, t);
}

double logistic_rate(const LogisticModel& model, double t) {
  const double n = logistic_fraction(model, t);
  return model.scale * model.rate * n * (1.0 - n);
}

namespace {

// UTF-8 encoding of the middle dot separating K from the exponential.
constexpr const char* kDot = "\xC2\xB7";

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

void skip_ws(std::string_view text, std::size_t& pos) {
  while (pos < text.size() &&
         std::isspace(static_cast<unsigned char>(text[pos]))) {
    ++pos;
  }
}

bool consume(std::string_view text, std::size_t& pos, std::string_view token) {
  skip_ws(text, pos);
  if (text.substr(pos, token.size()) != token) return false;
  pos += token.size();
  return true;
}

bool consume_number(std::string_view text, std::size_t& pos, double& out) {
  skip_ws(text, pos);
  std::size_t start = pos;
  while (pos < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[pos])) ||
          text[pos] == '.')) {
    ++pos;
  }
  if (pos == start) return false;
  out = std::strtod(std::string(text.substr(start, pos - start)).c_str(),
                    nullptr);
  return true;
}

}  // namespace

TransferFunctionDisplay format_transfer_function(const FopdtModel& model,
                                                 int decimals) {
  if (decimals < 0 || decimals > 6) {
    raise(Errc::invalid_argument, "decimals must lie in [0, 6]");
  }
  validate(model);
  std::string text = fixed(model.gain, decimals);
  text += kDot;
  text += "e^{-";
  text += fixed(model.dead_time, decimals);
  text += "s}/(";
  text += fixed(model.time_constant, decimals);
  text += "s+1)";
  return {text};
}

FopdtModel parse_transfer_function(std::string_view text, TimeUnit unit) {
  std::size_t pos = 0;
  FopdtModel model;
  model.time_unit = unit;
  bool ok = consume_number(text, pos, model.gain) &&
            consume(text, pos, kDot) && consume(text, pos, "e^{-") &&
            consume_number(text, pos, model.dead_time) &&
            consume(text, pos, "s}/(") &&
            consume_number(text, pos, model.time_constant) &&
            consume(text, pos, "s+1)");
  skip_ws(text, pos);
  if (!ok || pos != text.size()) {
    raise(Errc::invalid_argument,
          "transfer function text does not match K·e^{-Ls}/(Ts+1)");
  }
  validate(model);
  return model;
}

}  // namespace discdyn
