/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/middleware/ntcip_client.hpp"

#include <memory>

namespace phasebridge {

using wire::MsgType;
using wire::WireMessage;

NtcipClient::NtcipClient(Scheduler& scheduler, DatagramTransport& transport, Duration timeout)
    : scheduler_(scheduler), transport_(transport), timeout_(timeout) {
    transport_.on_receive([this](Bytes bytes) { on_datagram(std::move(bytes)); });
}

std::size_t NtcipClient::outstanding() const {
    std::lock_guard lock(mu_);
    return pending_.size();
}

std::uint64_t NtcipClient::ignored_replies() const {
    std::lock_guard lock(mu_);
    return ignored_;
}

std::uint16_t NtcipClient::send_request(WireMessage msg, std::function<void(std::optional<WireMessage>)> done,
                                        bool& sent) {
    std::uint16_t id;
    {
        std::lock_guard lock(mu_);
        do {
            id = next_id_++;
        } while (id == 0 || pending_.contains(id));
        msg.request_id = id;
        MsgType expect = msg.type == MsgType::Get ? MsgType::GetResponse : MsgType::SetResponse;
        TimerId timer = scheduler_.schedule_after(timeout_, [this, id] { expire(id); });
        pending_.emplace(id, Pending{expect, msg.object_id, timer, std::move(done)});
    }
    sent = transport_.send(wire::encode(msg));
    return id;
}

void NtcipClient::get(std::uint8_t object_id, GetCallback done) {
    bool sent = false;
    // A GET that never left the host is indistinguishable from a lost one: it
    // simply times out.
    send_request(WireMessage::get(0, object_id),
                 [done = std::move(done)](std::optional<WireMessage> reply) {
                     if (!reply || reply->type != MsgType::GetResponse || reply->payload.size() != 1) {
                         done(std::nullopt);
                         return;
                     }
                     done(wire::PhaseBitmask{reply->payload[0]});
                 },
                 sent);
}

bool NtcipClient::set_call(wire::PhaseBitmask call, SetCallback done) {
    bool sent = false;
    auto id = send_request(WireMessage::set(0, wire::object::kVehCall, call.bits),
                           [done = std::move(done)](std::optional<WireMessage> reply) {
                               if (!reply) return done(SetOutcome::TimedOut);
                               done(reply->type == MsgType::SetResponse ? SetOutcome::Acked : SetOutcome::Rejected);
                           },
                           sent);
    if (!sent) {
        std::lock_guard lock(mu_);
        auto it = pending_.find(id);
        if (it != pending_.end()) {
            scheduler_.cancel(it->second.timer);
            pending_.erase(it);
        }
    }
    return sent;
}

void NtcipClient::read_status(StatusCallback done) {
    struct Read {
        StatusGroups groups;
        bool ok = true;
        StatusCallback done;
    };
    auto read = std::make_shared<Read>();
    read->done = std::move(done);

    get(wire::object::kStatusRed, [this, read](std::optional<wire::PhaseBitmask> red) {
        if (red) read->groups.red = *red; else read->ok = false;
        get(wire::object::kStatusYellow, [this, read](std::optional<wire::PhaseBitmask> yellow) {
            if (yellow) read->groups.yellow = *yellow; else read->ok = false;
            get(wire::object::kStatusGreen, [read](std::optional<wire::PhaseBitmask> green) {
                if (green) read->groups.green = *green; else read->ok = false;
                read->done(read->ok ? std::optional{read->groups} : std::nullopt);
            });
        });
    });
}

void NtcipClient::on_datagram(Bytes bytes) {
    auto decoded = wire::decode(bytes);
    std::function<void(std::optional<WireMessage>)> done;
    std::optional<WireMessage> reply;
    {
        std::lock_guard lock(mu_);
        auto* msg = std::get_if<WireMessage>(&decoded);
        if (!msg) {
            ++ignored_;
            return;
        }
        auto it = pending_.find(msg->request_id);
        if (it == pending_.end() || msg->object_id != it->second.object_id ||
            (msg->type != it->second.expect && msg->type != MsgType::Error)) {
            ++ignored_;
            return;
        }
        scheduler_.cancel(it->second.timer);
        done = std::move(it->second.done);
        pending_.erase(it);
        reply = std::move(*msg);
    }
    done(std::move(reply));
}

void NtcipClient::expire(std::uint16_t id) {
    std::function<void(std::optional<WireMessage>)> done;
    {
        std::lock_guard lock(mu_);
        auto it = pending_.find(id);
        if (it == pending_.end()) return;
        done = std::move(it->second.done);
        pending_.erase(it);
    }
    done(std::nullopt);
}

}  // namespace phasebridge
