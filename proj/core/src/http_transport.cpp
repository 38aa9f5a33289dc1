#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "culturescope/providers.hpp"

namespace culturescope {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::string user_agent) : user_agent_(std::move(user_agent)) {}

  HttpResponse send(const HttpRequest& request) override {
    // Split "scheme://host[:port]/path?query".
    const auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::kRequest, "malformed url " + request.url);
    const auto path_start = request.url.find('/', scheme_end + 3);
    const std::string origin = request.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(request.timeout_seconds);
    const auto usecs = static_cast<time_t>((request.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_follow_location(true);

    httplib::Headers headers{{"User-Agent", user_agent_}};
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
      if (k == "Content-Type")
        content_type = v;
      else
        headers.emplace(k, v);
    }
    httplib::Result result = request.method == "GET" ? client.Get(path, headers)
                                                     : client.Post(path, headers, request.body, content_type);
    if (!result) {
      const auto err = result.error();
      if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout)
        throw Error(ErrorCode::kTimeout, "request to " + origin + " timed out (" + httplib::to_string(err) + ")");
      throw Error(ErrorCode::kTransport, "request to " + origin + " failed (" + httplib::to_string(err) + ")");
    }
    return HttpResponse{result->status, result->body};
  }

 private:
  std::string user_agent_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::string user_agent) {
  return std::make_unique<HttplibTransport>(std::move(user_agent));
}

}  // namespace culturescope
