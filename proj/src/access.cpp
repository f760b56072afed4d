#include "teacheval/access.hpp"

#include "teacheval/error.hpp"

namespace teacheval {

AccessDecision classify_access(const IpAddress& client_ip, const CampaignConfig& config) {
    if (!config.active) return {SessionMode::Closed, false};
    if (config.allowlist.contains(client_ip.str())) return {SessionMode::Official, false};
    return {SessionMode::Demo, true};
}

AccessDecision classify_access(std::string_view client_ip, const CampaignConfig& config) {
    return classify_access(IpAddress::parse(client_ip), config);
}

void authorize_reset(const AccessDecision& decision) {
    if (decision.mode != SessionMode::Demo) {
        throw Error(ErrorCode::ResetForbidden,
                    std::string("reset is not permitted in ") + std::string(mode_name(decision.mode)) + " mode");
    }
}

} // namespace teacheval
