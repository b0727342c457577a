#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace biasaudit {

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
};

// Minimal HTTP boundary so tests can drop in counting/mock transports and
// replay runs can assert zero network activity.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& url,
                              const std::vector<std::pair<std::string, std::string>>& headers,
                              const std::string& body) = 0;
};

// cpp-httplib backed transport. HTTPS requires an SSL-enabled build; without
// it, https:// URLs surface a provider error.
std::shared_ptr<Transport> make_http_transport(int timeout_seconds = 60);

} // namespace biasaudit
