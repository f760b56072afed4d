#pragma once

#include "teacheval/model.hpp"

#include <string_view>

namespace teacheval {

struct AccessDecision {
    SessionMode mode = SessionMode::Closed;
    bool reset_allowed = false;

    bool operator==(const AccessDecision&) const = default;
};

// active & allowlisted -> Official; active & other -> Demo (resettable);
// inactive -> Closed for every address. Throws InvalidAddress.
AccessDecision classify_access(std::string_view client_ip, const CampaignConfig& config);
AccessDecision classify_access(const IpAddress& client_ip, const CampaignConfig& config);

// Throws ResetForbidden unless the decision is Demo.
void authorize_reset(const AccessDecision& decision);

} // namespace teacheval
