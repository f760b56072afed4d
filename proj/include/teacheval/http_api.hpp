#pragma once

#include "teacheval/admin.hpp"
#include "teacheval/engine.hpp"
#include "teacheval/error.hpp"

#include <filesystem>
#include <functional>
#include <optional>

namespace httplib {
class Server;
struct Request;
} // namespace httplib

namespace teacheval {

struct ApiOptions {
    // Take the client address from X-Forwarded-For instead of the peer.
    bool trust_proxy_header = false;
    std::optional<std::filesystem::path> static_dir;
    // Source for POST /api/admin/bank/reload.
    std::optional<std::filesystem::path> questions_file;
};

// Fixed error -> HTTP status mapping.
int http_status_for(ErrorCode code);

class HttpApi {
public:
    using Clock = std::function<Timestamp()>;

    HttpApi(Store& store, ConfigCell& config, SessionEngine& engine, AdminService& admin, ApiOptions options,
            Clock clock = now_utc);

    void mount(httplib::Server& server);

    // Throws InvalidAddress.
    IpAddress client_address(const httplib::Request& req) const;

private:
    Store& store_;
    ConfigCell& config_;
    SessionEngine& engine_;
    AdminService& admin_;
    ApiOptions options_;
    Clock clock_;
};

} // namespace teacheval
