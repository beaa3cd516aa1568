#pragma once

// cpp-httplib backed Transport. Kept out of recommend.hpp so only the
// targets that talk to a live endpoint pull in httplib. Define
// CPPHTTPLIB_OPENSSL_SUPPORT before inclusion for https endpoints.

#include <map>
#include <string>

#include <httplib.h>

#include "esgbench/error.hpp"
#include "esgbench/recommend.hpp"

namespace esgbench::recommend {

class HttplibTransport final : public Transport {
public:
    explicit HttplibTransport(int timeout_s = 60) : timeout_s_(timeout_s) {}

    HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                      const std::string& body) override {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw ValidationError("llm endpoint is not an absolute URL: " + url);
        const auto path_start = url.find('/', scheme_end + 3);
        const std::string base = url.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(base);
        client.set_connection_timeout(timeout_s_);
        client.set_read_timeout(timeout_s_);
        httplib::Headers h;
        std::string content_type = "application/json";
        for (const auto& [k, v] : headers) {
            if (k == "Content-Type") {
                content_type = v;
            } else {
                h.emplace(k, v);
            }
        }
        auto res = client.Post(path, h, body, content_type);
        if (!res) throw TransportError("llm transport error: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }

private:
    int timeout_s_;
};

}  // namespace esgbench::recommend
