#include <deque>
#include <memory>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "haris/backend.hpp"

namespace haris {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr auto kStreamPoll = std::chrono::milliseconds(20);

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Bus& bus) : ws_(std::move(socket)), bus_(bus), timer_(ws_.get_executor()) {}

  ~WsSession() {
    for (auto& s : subs_) bus_.unsubscribe(s);
  }

  void run(http::request<http::string_body> req) {
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
      self->poll();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      self->on_frame(beast::buffers_to_string(self->buffer_.data()));
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void on_frame(const std::string& text) {
    try {
      const json j = json::parse(text);
      if (j.contains("subscribe")) {
        subs_.push_back(bus_.subscribe(j.at("subscribe").get<std::string>(), 4096));
        send(dump_json(json{{"ack", "subscribe"}, {"pattern", j["subscribe"]}}));
      } else if (j.contains("publish")) {
        const json& p = j.at("publish");
        const std::string topic = p.at("topic").get<std::string>();
        const json payload = p.contains("payload") ? p["payload"] : json::object();
        const std::uint64_t seq = bus_.publish(topic, message_from_json(topic, payload));
        send(dump_json(json{{"ack", "publish"}, {"topic", topic}, {"seq", seq}}));
      } else {
        send(dump_json(json{{"error", "expected 'subscribe' or 'publish'"}}));
      }
    } catch (const std::exception& e) {
      send(dump_json(json{{"error", e.what()}}));
    }
  }

  void poll() {
    if (closed_) return;
    for (auto& s : subs_)
      while (auto e = s->try_pop()) send(envelope_to_wire(*e));
    timer_.expires_after(kStreamPoll);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->poll();
    });
  }

  void send(std::string frame) {
    outbox_.push_back(std::move(frame));
    if (outbox_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write_next();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Bus& bus_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::vector<Bus::SubscriptionPtr> subs_;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, BackendService& service) : stream_(std::move(socket)), service_(service) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->on_request();
    });
  }

  void on_request() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/api/stream") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), service_.bus())->run(std::move(req_));
        return;
      }
    }
    const HttpResponse r = service_.handle(
        {std::string(req_.method_string()), std::string(req_.target()), req_.body()});
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(r.status), req_.version());
    res->set(http::field::server, "haris");
    res->set(http::field::content_type, r.content_type);
    res->keep_alive(req_.keep_alive());
    res->body() = r.body;
    res->prepare_payload();
    spdlog::debug("{} {} -> {}", std::string(req_.method_string()), std::string(req_.target()), r.status);
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  BackendService& service_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct HttpServer::Impl {
  BackendService& service;
  asio::io_context io{1};
  tcp::acceptor acceptor{io};
  std::thread thread;

  explicit Impl(BackendService& s) : service(s) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), service)->run();
      accept();
    });
  }
};

HttpServer::HttpServer(BackendService& service, const std::string& address, unsigned short port)
    : impl_(std::make_unique<Impl>(service)) {
  const tcp::endpoint ep{asio::ip::make_address(address), port};
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
}

HttpServer::~HttpServer() { stop(); }

unsigned short HttpServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void HttpServer::start() {
  if (impl_->thread.joinable()) return;
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void HttpServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->io.stop();
  impl_->thread.join();
}

}  // namespace haris
