#include "wes/platform_log.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wes::platform {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json action_to_json(const Event& event) {
  const Action& a = event.action;
  ordered_json j;
  j["ord"] = a.ordinal();
  j["kind"] = to_string(a.kind);
  switch (a.kind) {
    case ActionKind::SendFriendRequest:
      j["to"] = a.peer;
      break;
    case ActionKind::AcceptFriendRequest:
      j["from"] = a.peer;
      break;
    case ActionKind::CreatePost:
      j["tag"] = a.tag;
      j["privacy"] = to_string(a.privacy);
      if (event.outcome.created.has_value()) {
        j["entity"] = *event.outcome.created;
      }
      break;
    case ActionKind::SendMessage:
      j["to"] = a.peer;
      j["tag"] = a.tag;
      if (event.outcome.created.has_value()) {
        j["entity"] = *event.outcome.created;
      }
      break;
    case ActionKind::GetMessage:
      j["msg"] = a.message;
      break;
    case ActionKind::JoinGroup:
      j["group"] = a.group;
      break;
    case ActionKind::ShareData:
      j["entity"] = a.entity;
      j["to"] = a.peer;
      break;
  }
  return j;
}

}  // namespace

std::string event_to_line(const Event& event) {
  ordered_json j;
  j["seq"] = event.seq;
  j["vtime"] = event.vtime;
  j["actor"] = event.actor;
  j["action"] = action_to_json(event);
  j["outcome"] = event.outcome.applied ? "applied" : to_string(event.outcome.reason);
  if (event.visibility.all) {
    j["visibility"] = "all";
  } else {
    j["visibility"] = event.visibility.ids;
  }
  j["origin"] = to_string(event.origin);
  return j.dump();
}

Event event_from_line(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string("event_from_line: bad JSON: ") + ex.what());
  }
  Event ev;
  ev.seq = j.at("seq").get<EventSeq>();
  ev.vtime = j.at("vtime").get<Tick>();
  ev.actor = j.at("actor").get<UserId>();

  const auto& ja = j.at("action");
  const auto kind = action_kind_from_string(ja.at("kind").get<std::string>());
  if (!kind.has_value()) {
    throw std::runtime_error("event_from_line: unknown action kind");
  }
  std::optional<std::uint64_t> created;
  switch (*kind) {
    case ActionKind::SendFriendRequest:
      ev.action = Action::send_friend_request(ja.at("to").get<UserId>());
      ev.affected = {ja.at("to").get<UserId>()};
      break;
    case ActionKind::AcceptFriendRequest:
      ev.action = Action::accept_friend_request(ja.at("from").get<UserId>());
      ev.affected = {ja.at("from").get<UserId>()};
      break;
    case ActionKind::CreatePost: {
      const auto privacy = visibility_from_string(ja.at("privacy").get<std::string>());
      if (!privacy.has_value()) {
        throw std::runtime_error("event_from_line: unknown privacy");
      }
      ev.action = Action::create_post(ja.at("tag").get<ContentTag>(), *privacy);
      if (ja.contains("entity")) {
        created = ja.at("entity").get<std::uint64_t>();
        ev.affected = {*created};
      }
      break;
    }
    case ActionKind::SendMessage:
      ev.action = Action::send_message(ja.at("to").get<UserId>(),
                                       ja.at("tag").get<ContentTag>());
      ev.affected = {ja.at("to").get<UserId>()};
      if (ja.contains("entity")) {
        created = ja.at("entity").get<std::uint64_t>();
        ev.affected.push_back(*created);
      }
      break;
    case ActionKind::GetMessage:
      ev.action = Action::get_message(ja.at("msg").get<MessageId>());
      ev.affected = {ja.at("msg").get<MessageId>()};
      break;
    case ActionKind::JoinGroup:
      ev.action = Action::join_group(ja.at("group").get<GroupId>());
      ev.affected = {ja.at("group").get<GroupId>()};
      break;
    case ActionKind::ShareData:
      ev.action = Action::share_data(ja.at("entity").get<PostId>(),
                                     ja.at("to").get<UserId>());
      ev.affected = {ja.at("entity").get<PostId>(), ja.at("to").get<UserId>()};
      break;
  }

  const std::string outcome = j.at("outcome").get<std::string>();
  if (outcome == "applied") {
    ev.outcome = ActionOutcome::ok();
    ev.outcome.created = created;
  } else {
    throw std::runtime_error("event_from_line: log contains non-applied event");
  }

  const auto& jv = j.at("visibility");
  if (jv.is_string() && jv.get<std::string>() == "all") {
    ev.visibility.all = true;
  } else {
    ev.visibility.ids = jv.get<std::vector<UserId>>();
  }

  const std::string origin = j.at("origin").get<std::string>();
  ev.origin = origin == "real_user" ? Origin::RealUser : Origin::Bot;
  return ev;
}

std::string log_to_string(std::span<const Event> events) {
  std::string out;
  for (const Event& ev : events) {
    out += event_to_line(ev);
    out += '\n';
  }
  return out;
}

std::vector<Event> log_from_string(const std::string& text) {
  std::vector<Event> events;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      events.push_back(event_from_line(line));
    }
  }
  return events;
}

}  // namespace wes::platform
