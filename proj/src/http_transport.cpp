#include <httplib.h>

#include "tweetattack/candidates.hpp"
#include "tweetattack/errors.hpp"

namespace tweetattack::candidates {

namespace {

class HttpsTransport : public HttpTransport {
 public:
  explicit HttpsTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& host, const std::string& target) override {
    httplib::SSLClient client(host, 443);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.enable_server_certificate_verification(true);
    auto res = client.Get(target);
    if (!res) throw NetworkError("GET https://" + host + target + ": " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

 private:
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_https_transport(std::chrono::milliseconds timeout) {
  return std::make_shared<HttpsTransport>(timeout);
}

}  // namespace tweetattack::candidates
