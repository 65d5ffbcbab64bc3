#include "viewsnip/remote.hpp"

#include <charconv>

#include <httplib.h>
#include <json.hpp>

#include "viewsnip/errors.hpp"

namespace viewsnip {

namespace {

constexpr std::array<const char*, 3> kWireLabels = {"effective", "inconclusive",
                                                    "ineffective"};

}  // namespace

RemoteClassifier::RemoteClassifier(std::string endpoint, int timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {
  if (timeout_seconds_ <= 0) throw DataError("timeout must be positive");
  constexpr std::string_view scheme = "http://";
  std::string_view rest = endpoint_;
  if (rest.substr(0, scheme.size()) != scheme) {
    throw DataError("endpoint must start with http://: " + endpoint_);
  }
  rest.remove_prefix(scheme.size());
  std::string_view host_port = rest;
  path_ = "/";
  if (auto slash = rest.find('/'); slash != std::string_view::npos) {
    host_port = rest.substr(0, slash);
    path_ = std::string(rest.substr(slash));
  }
  port_ = 80;
  std::string_view host = host_port;
  if (auto colon = host_port.rfind(':'); colon != std::string_view::npos) {
    host = host_port.substr(0, colon);
    std::string_view digits = host_port.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port_);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || port_ < 1 ||
        port_ > 65535) {
      throw DataError("invalid port in endpoint: " + endpoint_);
    }
  }
  if (host.empty()) throw DataError("missing host in endpoint: " + endpoint_);
  host_ = std::string(host);
}

ViewpointDistribution RemoteClassifier::classify(std::string_view text,
                                                 const InterventionCondition& ic) const {
  if (trim_view(text).empty()) throw DataError("empty classifier input");

  nlohmann::ordered_json request;
  request["text"] = std::string(text);
  request["intervention"] = ic.intervention;
  request["condition"] = ic.condition;
  request["labels"] = kWireLabels;

  httplib::Client client(host_, port_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_write_timeout(timeout_seconds_, 0);

  httplib::Result result = client.Post(path_, request.dump(), "application/json");
  if (!result) {
    throw RemoteError(RemoteError::Kind::connect,
                      "cannot reach classifier endpoint " + endpoint_ + ": " +
                          httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw RemoteError(RemoteError::Kind::http_status,
                      "classifier endpoint returned status " +
                          std::to_string(result->status));
  }

  auto malformed = [] {
    return RemoteError(RemoteError::Kind::malformed_reply, "malformed classifier reply");
  };
  nlohmann::json reply = nlohmann::json::parse(result->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("scores") ||
      !reply.at("scores").is_object()) {
    throw malformed();
  }
  const auto& scores = reply.at("scores");
  if (scores.size() != kWireLabels.size()) throw malformed();
  std::array<double, 3> values{};
  for (std::size_t k = 0; k < kWireLabels.size(); ++k) {
    if (!scores.contains(kWireLabels[k]) || !scores.at(kWireLabels[k]).is_number()) {
      throw malformed();
    }
    values[k] = scores.at(kWireLabels[k]).get<double>();
  }
  try {
    return ViewpointDistribution::normalized(values);
  } catch (const DataError& e) {
    throw RemoteError(RemoteError::Kind::invalid_scores,
                      std::string("classifier reply rejected: ") + e.what());
  }
}

std::string RemoteClassifier::id() const { return "remote:" + endpoint_; }

}  // namespace viewsnip
