#include "hapdrive/service.hpp"

#include <chrono>
#include <deque>
#include <optional>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "hapdrive/config.hpp"
#include "hapdrive/error.hpp"
#include "hapdrive/metrics.hpp"
#include "hapdrive/session.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using config::json;

namespace {

constexpr auto kTickPeriod = std::chrono::microseconds(1'000'000 / units::kSimRateHz);

json error_frame(const std::string& message)
{
    return {{"type", "error"}, {"version", kProtocolVersion}, {"message", message}};
}

json record_json(const LogRecord& r)
{
    json out = json::object();
    const auto names = runlog_columns();
    const auto values = record_values(r);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out[std::string(names[i])] = values[i];
    }
    return out;
}

json track_frame(const track::TrackPath& path)
{
    json poly = json::array();
    const double step = 2.0;
    for (double s = 0.0;; s += step) {
        const double ss = std::min(s, path.total_length());
        const track::Point p = path.point_at(ss);
        poly.push_back({p.x, p.y});
        if (ss >= path.total_length()) {
            break;
        }
    }
    return {{"type", "track"},
            {"version", kProtocolVersion},
            {"text", track::to_text(path)},
            {"lane_width", path.lane_width()},
            {"num_lanes", path.num_lanes()},
            {"total_length", path.total_length()},
            {"midline", poly}};
}

double number(const json& j, const char* key, double fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw FormatError(std::string("field '") + key + "' must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw FormatError(std::string("field '") + key + "' must be finite");
    }
    return x;
}

harness::DriverInput parse_input(const json& j, const harness::DriverInput& previous)
{
    harness::DriverInput in = previous;
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "intent") {
            in.mode = harness::DriverInput::Mode::intent;
        } else if (mode == "torque") {
            in.mode = harness::DriverInput::Mode::torque;
        } else {
            throw FormatError("input mode must be intent or torque");
        }
    }
    in.steer = number(j, "steer", in.steer);
    in.accel = number(j, "accel", in.accel);
    in.brake = number(j, "brake", in.brake);
    if (j.contains("hands_on_wheel")) {
        in.hands_on_wheel = j.at("hands_on_wheel").get<bool>();
    }
    return in;
}

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, const ServiceOptions& opt)
        : ws_(std::move(socket)), timer_(ws_.get_executor()), opt_(opt)
    {
    }

    void run()
    {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (!ec) {
                self->send({{"type", "welcome"},
                            {"version", kProtocolVersion},
                            {"methods", self->opt_.net_s && self->opt_.net_a ? json{"N", "G", "C"} : json{"N", "C"}},
                            {"columns", runlog_columns()}});
                self->read();
            }
        });
    }

private:
    void read()
    {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->close();
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->handle(text);
            self->read();
        });
    }

    void close()
    {
        closed_ = true;
        timer_.cancel();
        session_.reset();
    }

    void handle(const std::string& text)
    {
        try {
            const json msg = json::parse(text);
            if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string()) {
                throw FormatError("frame needs a string 'type'");
            }
            if (msg.contains("version") && msg.at("version") != kProtocolVersion) {
                throw FormatError("unsupported protocol version");
            }
            const std::string type = msg.at("type").get<std::string>();
            if (type == "hello") {
                send({{"type", "welcome"}, {"version", kProtocolVersion}});
            } else if (type == "start") {
                start(msg);
            } else if (type == "input") {
                input_ = parse_input(msg, input_);
            } else if (type == "step") {
                step_frames(msg);
            } else if (type == "method") {
                need_session();
                session_->set_method(guidance::method_from_string(msg.at("method").get<std::string>()));
                method_switched_ = true;
            } else if (type == "reset") {
                timer_.cancel();
                session_.reset();
                send({{"type", "reset"}, {"version", kProtocolVersion}});
            } else {
                throw FormatError("unknown frame type '" + type + "'");
            }
        } catch (const json::exception& e) {
            send(error_frame(std::string("malformed frame: ") + e.what()));
        } catch (const Error& e) {
            send(error_frame(e.what()));
        }
    }

    void need_session() const
    {
        if (!session_) {
            throw FormatError("no session; send a start frame first");
        }
    }

    void start(const json& msg)
    {
        harness::PathSpec path;
        if (msg.contains("path")) {
            path = config::path_spec_from_json(msg.at("path"));
        }
        if (path.kind == harness::PathSpec::Kind::file) {
            throw ConfigInvalid("file paths are not served");
        }
        harness::SessionOptions so;
        so.duration_cap = number(msg, "duration_cap_s", opt_.default_duration_cap);
        if (msg.contains("gains")) {
            so.gains = config::gains_from_json(msg.at("gains"));
        }
        if (msg.contains("driver")) {
            const json& d = msg.at("driver");
            const agents::Skill skill = agents::skill_from_string(d.value("skill", std::string("expert")));
            const int individual = d.value("individual", 0);
            so.impedance = agents::individual(skill, individual);
            if (d.contains("params")) {
                so.impedance = config::agent_params_from_json(d.at("params"), so.impedance);
            }
        }
        const std::string method = msg.value("method", std::string("N"));
        const std::string pacing = msg.value("pacing", std::string("realtime"));
        if (pacing != "realtime" && pacing != "lockstep") {
            throw FormatError("pacing must be realtime or lockstep");
        }
        timer_.cancel();
        track::TrackPath built = harness::build_path(path);
        session_ = std::make_unique<harness::Session>(built, guidance::method_from_string(method), opt_.net_s,
                                                      opt_.net_a, so);
        metrics_.emplace(&session_->path(), opt_.net_s, opt_.net_a, units::kTargetSpeed);
        input_ = {};
        realtime_ = pacing == "realtime";
        send(track_frame(session_->path()));
        if (realtime_) {
            next_deadline_ = std::chrono::steady_clock::now() + kTickPeriod;
            schedule();
        }
    }

    void step_frames(const json& msg)
    {
        need_session();
        if (realtime_) {
            throw FormatError("step frames are only accepted in lockstep pacing");
        }
        if (msg.contains("input")) {
            input_ = parse_input(msg.at("input"), input_);
        }
        const int ticks = msg.value("ticks", 1);
        if (ticks < 1 || ticks > 100000) {
            throw FormatError("ticks must be between 1 and 100000");
        }
        for (int i = 0; i < ticks && session_ && !session_->finished(); ++i) {
            advance();
        }
    }

    void schedule()
    {
        timer_.expires_at(next_deadline_);
        timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
            if (ec || self->closed_ || !self->session_ || !self->realtime_) {
                return;
            }
            try {
                self->advance();
            } catch (const Error& e) {
                self->send(error_frame(e.what()));
                self->session_.reset();
                return;
            }
            if (self->session_ && !self->session_->finished()) {
                self->next_deadline_ += kTickPeriod;
                self->schedule();
            }
        });
    }

    void advance()
    {
        const harness::DriverInput in = input_;
        const LogRecord& r = session_->step([&in](const harness::Sensed&) { return in; });
        metrics_->push(r);
        const metrics::MetricsReport m = metrics_->report();
        json metrics = {{"E_d", m.E_d},       {"E_delta", m.E_delta}, {"Omega_a", m.Omega_a},
                        {"E_s_p", m.E_s_p},   {"E_a_p", m.E_a_p},     {"n_pred", m.n_pred}};
        metrics["E_v"] = m.E_v ? json(*m.E_v) : json(nullptr);
        send({{"type", "state"},
              {"version", kProtocolVersion},
              {"tick", session_->tick() - 1},
              {"method", std::string(1, guidance::to_char(session_->method()))},
              {"method_switched", method_switched_},
              {"speedometer_kmh", units::ms2kmh(r.v) * 60.0 / units::kTargetSpeedKmh},
              {"record", record_json(r)},
              {"metrics", metrics}});
        method_switched_ = false;
        if (session_->finished()) {
            send({{"type", "finished"},
                  {"version", kProtocolVersion},
                  {"completed", session_->completed()},
                  {"samples", session_->log().size()}});
        }
    }

    void send(const json& frame)
    {
        if (closed_) {
            return;
        }
        queue_.push_back(frame.dump());
        if (queue_.size() == 1) {
            write();
        }
    }

    void write()
    {
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->close();
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty()) {
                self->write();
            }
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    asio::steady_timer timer_;
    ServiceOptions opt_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    std::unique_ptr<harness::Session> session_;
    std::optional<metrics::StreamingMetrics> metrics_;
    harness::DriverInput input_;
    bool realtime_ = true;
    bool closed_ = false;
    bool method_switched_ = false;
    std::chrono::steady_clock::time_point next_deadline_;
};

}  // namespace

struct Server::Impl {
    Impl(const std::string& address, std::uint16_t port, ServiceOptions o)
        : acceptor(ioc, tcp::endpoint(asio::ip::make_address(address), port)), opt(o)
    {
    }

    void accept()
    {
        acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            std::make_shared<Connection>(std::move(socket), opt)->run();
            accept();
        });
    }

    asio::io_context ioc{1};
    tcp::acceptor acceptor;
    ServiceOptions opt;
    std::thread thread;
};

Server::Server(const std::string& address, std::uint16_t port, ServiceOptions options)
    : impl_(std::make_unique<Impl>(address, port, options))
{
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run()
{
    impl_->accept();
    impl_->ioc.run();
}

void Server::start()
{
    impl_->accept();
    impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop()
{
    impl_->ioc.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

}  // namespace hapdrive::service
