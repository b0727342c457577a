#include "core/transport.hpp"

#include <httplib.h>

#include "core/errors.hpp"

namespace biasaudit {

namespace {

struct ParsedUrl {
    std::string scheme;
    std::string host_port; // "host:port" or "host"
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        fail(errc::provider, "malformed endpoint url: " + url);
    }
    out.scheme = url.substr(0, scheme_end);
    size_t host_begin = scheme_end + 3;
    size_t path_begin = url.find('/', host_begin);
    if (path_begin == std::string::npos) {
        out.host_port = url.substr(host_begin);
        out.path = "/";
    } else {
        out.host_port = url.substr(host_begin, path_begin - host_begin);
        out.path = url.substr(path_begin);
    }
    return out;
}

class HttplibTransport : public Transport {
public:
    explicit HttplibTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

    HttpResponse post(const std::string& url,
                      const std::vector<std::pair<std::string, std::string>>& headers,
                      const std::string& body) override {
        ParsedUrl parsed = parse_url(url);
        if (parsed.scheme != "http") {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
            fail(errc::provider, "https endpoint requires an SSL-enabled build: " + url);
#endif
        }

        httplib::Client client((parsed.scheme + "://" + parsed.host_port).c_str());
        client.set_connection_timeout(timeout_seconds_, 0);
        client.set_read_timeout(timeout_seconds_, 0);

        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);

        auto res = client.Post(parsed.path, h, body, "application/json");
        if (!res) {
            fail(errc::provider, "transport failure for " + url + ": " + httplib::to_string(res.error()));
        }

        HttpResponse out;
        out.status = res->status;
        out.body = res->body;
        for (const auto& [k, v] : res->headers) out.headers[k] = v;
        return out;
    }

private:
    int timeout_seconds_;
};

} // namespace

std::shared_ptr<Transport> make_http_transport(int timeout_seconds) {
    return std::make_shared<HttplibTransport>(timeout_seconds);
}

} // namespace biasaudit
