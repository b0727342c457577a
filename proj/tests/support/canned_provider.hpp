#pragma once

#include <string>

#include "core/transport.hpp"

namespace biasaudit::testing {

// Deterministic stand-in for provider and classifier endpoints. Responses
// are pure functions of the request body, so record/replay fixtures come out
// byte-stable. Rules are intentionally crude: gendered or nationality
// wording drives bias levels, negative phrasing drives distortion labels.
class CannedProviderTransport : public Transport {
public:
    HttpResponse post(const std::string& url,
                      const std::vector<std::pair<std::string, std::string>>& headers,
                      const std::string& body) override;

    long long calls = 0;
};

} // namespace biasaudit::testing
