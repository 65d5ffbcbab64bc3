#pragma once

#include <string>
#include <string_view>

#include "viewsnip/viewpoint.hpp"

namespace viewsnip {

// Adapter for an external model server speaking the JSON wire protocol:
//
//   request  POST {"text": ..., "intervention": ..., "condition": ...,
//                  "labels": ["effective", "inconclusive", "ineffective"]}
//   reply         {"scores": {"effective": n, "inconclusive": n,
//                             "ineffective": n}}
//
// Replies are validated and renormalized into a ViewpointDistribution; every
// failure raises a RemoteError with a distinct kind, never a silent default.
// Requests are at-most-once (no retries) so batch runs report errors
// deterministically.
class RemoteClassifier final : public ViewpointClassifier {
 public:
  // Accepts http://host[:port][/path]; throws DataError on anything else.
  explicit RemoteClassifier(std::string endpoint, int timeout_seconds = 10);

  ViewpointDistribution classify(std::string_view text,
                                 const InterventionCondition& ic) const override;
  std::string id() const override;

 private:
  std::string endpoint_;
  std::string host_;
  int port_;
  std::string path_;
  int timeout_seconds_;
};

}  // namespace viewsnip
