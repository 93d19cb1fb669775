#include "wes/platform.hpp"

#include <algorithm>
#include <stdexcept>

#include "wes/hash.hpp"

namespace wes::platform {

namespace {

std::pair<UserId, UserId> norm_pair(UserId a, UserId b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::SendFriendRequest: return "send_friend_request";
    case ActionKind::AcceptFriendRequest: return "accept_friend_request";
    case ActionKind::CreatePost: return "create_post";
    case ActionKind::SendMessage: return "send_message";
    case ActionKind::GetMessage: return "get_message";
    case ActionKind::JoinGroup: return "join_group";
    case ActionKind::ShareData: return "share_data";
  }
  return "unknown";
}

const char* to_string(Visibility vis) {
  switch (vis) {
    case Visibility::Public: return "public";
    case Visibility::FriendsOnly: return "friends_only";
    case Visibility::OwnerOnly: return "owner_only";
  }
  return "unknown";
}

const char* to_string(Origin origin) {
  return origin == Origin::Bot ? "bot" : "real_user";
}

const char* to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::ReadMessage: return "read_message";
    case QueryKind::ViewPost: return "view_post";
    case QueryKind::ViewProfile: return "view_profile";
    case QueryKind::ListFriends: return "list_friends";
    case QueryKind::SearchUsers: return "search_users";
  }
  return "unknown";
}

const char* to_string(DenyReason reason) {
  switch (reason) {
    case DenyReason::None: return "none";
    case DenyReason::IsolationViolation: return "isolation_violation";
    case DenyReason::PrivacyDenied: return "privacy_denied";
    case DenyReason::UnknownEntity: return "unknown_entity";
    case DenyReason::AlreadyFetched: return "already_fetched";
    case DenyReason::NotRecipient: return "not_recipient";
    case DenyReason::Duplicate: return "duplicate";
    case DenyReason::InvalidTarget: return "invalid_target";
    case DenyReason::RateLimited: return "rate_limited";
    case DenyReason::Masked: return "masked";
    case DenyReason::DroppedByFault: return "dropped_by_fault";
  }
  return "unknown";
}

std::optional<ActionKind> action_kind_from_string(std::string_view name) {
  for (int i = 0; i < kActionKindCount; ++i) {
    const auto kind = static_cast<ActionKind>(i);
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

std::optional<Visibility> visibility_from_string(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    const auto vis = static_cast<Visibility>(i);
    if (name == to_string(vis)) {
      return vis;
    }
  }
  return std::nullopt;
}

Action Action::send_friend_request(UserId to) {
  Action a;
  a.kind = ActionKind::SendFriendRequest;
  a.peer = to;
  return a;
}

Action Action::accept_friend_request(UserId from) {
  Action a;
  a.kind = ActionKind::AcceptFriendRequest;
  a.peer = from;
  return a;
}

Action Action::create_post(ContentTag tag, Visibility privacy) {
  Action a;
  a.kind = ActionKind::CreatePost;
  a.tag = tag;
  a.privacy = privacy;
  return a;
}

Action Action::send_message(UserId to, ContentTag tag) {
  Action a;
  a.kind = ActionKind::SendMessage;
  a.peer = to;
  a.tag = tag;
  return a;
}

Action Action::get_message(MessageId id) {
  Action a;
  a.kind = ActionKind::GetMessage;
  a.message = id;
  return a;
}

Action Action::join_group(GroupId g) {
  Action a;
  a.kind = ActionKind::JoinGroup;
  a.group = g;
  return a;
}

Action Action::share_data(PostId entity, UserId to) {
  Action a;
  a.kind = ActionKind::ShareData;
  a.entity = entity;
  a.peer = to;
  return a;
}

ObservationQuery ObservationQuery::read_message(MessageHandle handle) {
  ObservationQuery q;
  q.kind = QueryKind::ReadMessage;
  q.message = handle.id;
  return q;
}

ObservationQuery ObservationQuery::view_post(PostId id) {
  ObservationQuery q;
  q.kind = QueryKind::ViewPost;
  q.post = id;
  return q;
}

ObservationQuery ObservationQuery::view_profile(UserId id) {
  ObservationQuery q;
  q.kind = QueryKind::ViewProfile;
  q.user = id;
  return q;
}

ObservationQuery ObservationQuery::list_friends(UserId id) {
  ObservationQuery q;
  q.kind = QueryKind::ListFriends;
  q.user = id;
  return q;
}

ObservationQuery ObservationQuery::search_users(TraitFilter filter, std::uint32_t limit,
                                                std::uint32_t max_hops) {
  ObservationQuery q;
  q.kind = QueryKind::SearchUsers;
  q.filter = filter;
  q.limit = limit;
  q.max_hops = max_hops;
  return q;
}

bool VisibilitySet::contains(UserId user) const {
  if (all) {
    return true;
  }
  return std::binary_search(ids.begin(), ids.end(), user);
}

bool WorldState::are_friends(UserId a, UserId b) const {
  auto it = adjacency.find(a);
  return it != adjacency.end() && it->second.count(b) > 0;
}

std::size_t WorldState::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& [_, neighbors] : adjacency) {
    degree_sum += neighbors.size();
  }
  return degree_sum / 2;
}

UserId add_user(WorldState& world, const UserProfile& profile) {
  if (world.users.count(profile.id) > 0) {
    throw std::invalid_argument("add_user: id already exists");
  }
  world.users.emplace(profile.id, profile);
  if (profile.partition == Partition::Protected) {
    world.protected_users.insert(profile.id);
  }
  return profile.id;
}

namespace {

void link_users(WorldState& world, UserId a, UserId b) {
  world.adjacency[a].insert(b);
  world.adjacency[b].insert(a);
  if (world.is_protected(a) || world.is_protected(b)) {
    world.protected_edges.insert(norm_pair(a, b));
  }
}

}  // namespace

void add_friendship(WorldState& world, UserId a, UserId b) {
  if (a == b || !world.has_user(a) || !world.has_user(b)) {
    throw std::invalid_argument("add_friendship: bad endpoints");
  }
  link_users(world, a, b);
}

GroupId add_group(WorldState& world, std::span<const UserId> members) {
  const GroupId id = world.next_group_id++;
  auto& set = world.groups[id];
  for (UserId m : members) {
    set.insert(m);
  }
  return id;
}

namespace {

void push_notification(WorldState& world, UserId user, Notification n) {
  world.notifications[user].push_back(n);
}

VisibilitySet vis_single(UserId user) {
  VisibilitySet v;
  v.ids = {user};
  return v;
}

VisibilitySet vis_all() {
  VisibilitySet v;
  v.all = true;
  return v;
}

VisibilitySet vis_friends_and_owner(const WorldState& world, UserId owner) {
  VisibilitySet v;
  auto it = world.adjacency.find(owner);
  if (it != world.adjacency.end()) {
    v.ids.assign(it->second.begin(), it->second.end());
  }
  v.ids.push_back(owner);
  std::sort(v.ids.begin(), v.ids.end());
  return v;
}

VisibilitySet vis_members(const std::set<UserId>& members) {
  VisibilitySet v;
  v.ids.assign(members.begin(), members.end());
  return v;
}

void emit_event(WorldState& world, UserId actor, const Action& action,
                std::vector<std::uint64_t> affected, VisibilitySet visibility,
                Tick vtime, Origin origin) {
  Event ev;
  ev.seq = world.events.size() + 1;
  ev.vtime = vtime;
  ev.actor = actor;
  ev.action = action;
  ev.outcome = ActionOutcome::ok();
  ev.affected = std::move(affected);
  ev.visibility = std::move(visibility);
  ev.origin = origin;
  world.events.push_back(std::move(ev));
  world.action_counter += 1;
}

Visibility effective_visibility(Visibility vis, const FaultConfig* faults) {
  if (faults != nullptr && faults->privacy_downgrade && vis == Visibility::FriendsOnly) {
    return Visibility::Public;
  }
  return vis;
}

bool can_view_profile(const WorldState& world, UserId actor, UserId subject,
                      const FaultConfig* faults) {
  if (actor == subject) {
    return true;
  }
  switch (effective_visibility(world.users.at(subject).profile_visibility, faults)) {
    case Visibility::Public: return true;
    case Visibility::FriendsOnly: return world.are_friends(actor, subject);
    case Visibility::OwnerOnly: return false;
  }
  return false;
}

bool can_view_post(const WorldState& world, UserId actor, const Post& post,
                   const FaultConfig* faults) {
  if (actor == post.author) {
    return true;
  }
  switch (effective_visibility(post.visibility, faults)) {
    case Visibility::Public: return true;
    case Visibility::FriendsOnly: return world.are_friends(actor, post.author);
    case Visibility::OwnerOnly: return false;
  }
  return false;
}

// Users the action touches besides the actor, for isolation checks. Returns
// false if a referenced entity is missing (caller resolves exact reason).
bool involved_users(const WorldState& world, const Action& action,
                    std::vector<UserId>& out) {
  switch (action.kind) {
    case ActionKind::SendFriendRequest:
    case ActionKind::AcceptFriendRequest:
    case ActionKind::SendMessage:
      if (!world.has_user(action.peer)) {
        return false;
      }
      out.push_back(action.peer);
      return true;
    case ActionKind::GetMessage: {
      auto it = world.messages.find(action.message);
      if (it == world.messages.end()) {
        return false;
      }
      out.push_back(it->second.sender);
      return true;
    }
    case ActionKind::ShareData: {
      if (!world.has_user(action.peer)) {
        return false;
      }
      auto it = world.posts.find(action.entity);
      if (it == world.posts.end()) {
        return false;
      }
      out.push_back(action.peer);
      out.push_back(it->second.author);
      return true;
    }
    case ActionKind::CreatePost:
    case ActionKind::JoinGroup:
      return true;
  }
  return true;
}

}  // namespace

ActionOutcome get_message(WorldState& world, UserId actor, MessageId id, Tick vtime,
                          Origin origin) {
  auto it = world.messages.find(id);
  if (it == world.messages.end()) {
    return ActionOutcome::denied(DenyReason::UnknownEntity);
  }
  Message& msg = it->second;
  if (msg.recipient != actor) {
    return ActionOutcome::denied(DenyReason::NotRecipient);
  }
  if (msg.fetched) {
    return ActionOutcome::denied(DenyReason::AlreadyFetched);
  }
  msg.fetched = true;
  push_notification(world, msg.sender,
                    {vtime, NotificationKind::MessageRead, actor, msg.id});
  emit_event(world, actor, Action::get_message(id), {msg.id}, vis_single(msg.sender),
             vtime, origin);
  ActionOutcome outcome = ActionOutcome::ok();
  outcome.handle = MessageHandle{id};
  return outcome;
}

ActionOutcome apply_action(WorldState& world, UserId actor, BotClass bot_class,
                           const Action& action, Tick vtime, Origin origin,
                           const FaultConfig* faults, Rng* fault_rng) {
  if (!world.has_user(actor)) {
    return ActionOutcome::denied(DenyReason::UnknownEntity);
  }
  if (origin == Origin::Bot) {
    // Read-only bots never cause state change, full stop.
    if (bot_class == BotClass::ReadOnly) {
      return ActionOutcome::denied(DenyReason::IsolationViolation);
    }
    std::vector<UserId> involved;
    if (involved_users(world, action, involved)) {
      for (UserId u : involved) {
        if (world.is_protected(u)) {
          return ActionOutcome::denied(DenyReason::IsolationViolation);
        }
      }
    }
    // Missing entities fall through to the per-action checks below, which
    // report the precise reason.
  }

  switch (action.kind) {
    case ActionKind::SendFriendRequest: {
      if (!world.has_user(action.peer)) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      if (action.peer == actor) {
        return ActionOutcome::denied(DenyReason::InvalidTarget);
      }
      if (world.are_friends(actor, action.peer)) {
        return ActionOutcome::denied(DenyReason::Duplicate);
      }
      if (world.pending.count({actor, action.peer}) > 0 ||
          world.pending.count({action.peer, actor}) > 0) {
        return ActionOutcome::denied(DenyReason::Duplicate);
      }
      world.pending.insert({actor, action.peer});
      if (world.is_protected(actor) || world.is_protected(action.peer)) {
        world.protected_pending.insert({actor, action.peer});
      }
      push_notification(world, action.peer,
                        {vtime, NotificationKind::FriendRequest, actor, 0});
      emit_event(world, actor, action, {action.peer}, vis_single(action.peer), vtime,
                 origin);
      return ActionOutcome::ok();
    }
    case ActionKind::AcceptFriendRequest: {
      if (!world.has_user(action.peer)) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      auto it = world.pending.find({action.peer, actor});
      if (it == world.pending.end()) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      world.pending.erase(it);
      world.protected_pending.erase({action.peer, actor});
      link_users(world, actor, action.peer);
      push_notification(world, action.peer,
                        {vtime, NotificationKind::RequestAccepted, actor, 0});
      emit_event(world, actor, action, {action.peer}, vis_single(action.peer), vtime,
                 origin);
      return ActionOutcome::ok();
    }
    case ActionKind::CreatePost: {
      if (action.tag >= kContentTagCount) {
        return ActionOutcome::denied(DenyReason::InvalidTarget);
      }
      const PostId id = world.next_post_id++;
      world.posts.emplace(id, Post{id, actor, action.tag, action.privacy});
      if (world.is_protected(actor)) {
        world.protected_posts.insert(id);
      }
      VisibilitySet vis;
      switch (action.privacy) {
        case Visibility::Public: vis = vis_all(); break;
        case Visibility::FriendsOnly: vis = vis_friends_and_owner(world, actor); break;
        case Visibility::OwnerOnly: vis = vis_single(actor); break;
      }
      emit_event(world, actor, action, {id}, std::move(vis), vtime, origin);
      ActionOutcome outcome = ActionOutcome::ok();
      outcome.created = id;
      return outcome;
    }
    case ActionKind::SendMessage: {
      if (!world.has_user(action.peer)) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      if (action.peer == actor) {
        return ActionOutcome::denied(DenyReason::InvalidTarget);
      }
      if (action.tag >= kContentTagCount) {
        return ActionOutcome::denied(DenyReason::InvalidTarget);
      }
      // Messaging requires friendship; the scam funnel is request -> accept
      // -> message.
      if (!world.are_friends(actor, action.peer)) {
        return ActionOutcome::denied(DenyReason::PrivacyDenied);
      }
      if (faults != nullptr && faults->message_drop_p > 0.0 && fault_rng != nullptr &&
          fault_rng->bernoulli(faults->message_drop_p)) {
        return ActionOutcome::denied(DenyReason::DroppedByFault);
      }
      const MessageId id = world.next_message_id++;
      world.messages.emplace(id, Message{id, actor, action.peer, action.tag, false});
      if (world.is_protected(actor) || world.is_protected(action.peer)) {
        world.protected_messages.insert(id);
      }
      // Notification loss is a delivery-layer fault handled by the episode
      // executor when bots consume their queues; state stays replayable.
      push_notification(world, action.peer,
                        {vtime, NotificationKind::NewMessage, actor, id});
      emit_event(world, actor, action, {action.peer, id}, vis_single(action.peer),
                 vtime, origin);
      ActionOutcome outcome = ActionOutcome::ok();
      outcome.created = id;
      return outcome;
    }
    case ActionKind::GetMessage:
      return get_message(world, actor, action.message, vtime, origin);
    case ActionKind::JoinGroup: {
      auto it = world.groups.find(action.group);
      if (it == world.groups.end()) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      if (it->second.count(actor) > 0) {
        return ActionOutcome::denied(DenyReason::Duplicate);
      }
      it->second.insert(actor);
      emit_event(world, actor, action, {action.group}, vis_members(it->second), vtime,
                 origin);
      return ActionOutcome::ok();
    }
    case ActionKind::ShareData: {
      if (!world.has_user(action.peer)) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      if (action.peer == actor) {
        return ActionOutcome::denied(DenyReason::InvalidTarget);
      }
      auto it = world.posts.find(action.entity);
      if (it == world.posts.end()) {
        return ActionOutcome::denied(DenyReason::UnknownEntity);
      }
      if (!can_view_post(world, actor, it->second, faults)) {
        return ActionOutcome::denied(DenyReason::PrivacyDenied);
      }
      push_notification(world, action.peer,
                        {vtime, NotificationKind::Share, actor, action.entity});
      emit_event(world, actor, action, {action.entity, action.peer},
                 vis_single(action.peer), vtime, origin);
      return ActionOutcome::ok();
    }
  }
  return ActionOutcome::denied(DenyReason::InvalidTarget);
}

namespace {

std::vector<UserId> bfs_within_hops(const WorldState& world, UserId origin,
                                    std::uint32_t max_hops) {
  std::vector<UserId> reached;
  std::set<UserId> visited{origin};
  std::deque<std::pair<UserId, std::uint32_t>> frontier{{origin, 0}};
  while (!frontier.empty()) {
    auto [user, depth] = frontier.front();
    frontier.pop_front();
    if (depth >= max_hops) {
      continue;
    }
    auto it = world.adjacency.find(user);
    if (it == world.adjacency.end()) {
      continue;
    }
    for (UserId next : it->second) {
      if (visited.insert(next).second) {
        reached.push_back(next);
        frontier.push_back({next, depth + 1});
      }
    }
  }
  std::sort(reached.begin(), reached.end());
  return reached;
}

}  // namespace

ObservationResult observe(const WorldState& world, UserId actor, BotClass bot_class,
                          const ObservationQuery& query, const FaultConfig* faults) {
  ObservationResult result;
  result.kind = query.kind;
  auto deny = [&](DenyReason reason) {
    result.ok = false;
    result.reason = reason;
    return result;
  };
  if (!world.has_user(actor)) {
    return deny(DenyReason::UnknownEntity);
  }
  const bool fully_isolated = bot_class == BotClass::FullyIsolated;

  switch (query.kind) {
    case QueryKind::ViewProfile: {
      if (!world.has_user(query.user)) {
        return deny(DenyReason::UnknownEntity);
      }
      if (fully_isolated && world.is_protected(query.user)) {
        return deny(DenyReason::IsolationViolation);
      }
      if (!can_view_profile(world, actor, query.user, faults)) {
        return deny(DenyReason::PrivacyDenied);
      }
      result.ok = true;
      result.profile = world.users.at(query.user);
      return result;
    }
    case QueryKind::ViewPost: {
      auto it = world.posts.find(query.post);
      if (it == world.posts.end()) {
        return deny(DenyReason::UnknownEntity);
      }
      if (fully_isolated && world.is_protected(it->second.author)) {
        return deny(DenyReason::IsolationViolation);
      }
      if (!can_view_post(world, actor, it->second, faults)) {
        return deny(DenyReason::PrivacyDenied);
      }
      result.ok = true;
      result.post = it->second;
      return result;
    }
    case QueryKind::ListFriends: {
      if (!world.has_user(query.user)) {
        return deny(DenyReason::UnknownEntity);
      }
      if (fully_isolated && world.is_protected(query.user)) {
        return deny(DenyReason::IsolationViolation);
      }
      if (!can_view_profile(world, actor, query.user, faults)) {
        return deny(DenyReason::PrivacyDenied);
      }
      result.ok = true;
      auto it = world.adjacency.find(query.user);
      if (it != world.adjacency.end()) {
        for (UserId friend_id : it->second) {
          if (fully_isolated && world.is_protected(friend_id)) {
            continue;
          }
          result.users.push_back(friend_id);
        }
      }
      return result;
    }
    case QueryKind::ReadMessage: {
      auto it = world.messages.find(query.message);
      if (it == world.messages.end()) {
        return deny(DenyReason::UnknownEntity);
      }
      const Message& msg = it->second;
      if (msg.recipient != actor) {
        return deny(DenyReason::NotRecipient);
      }
      if (!msg.fetched) {
        // The handle only exists once the message has been fetched.
        return deny(DenyReason::UnknownEntity);
      }
      result.ok = true;
      result.message_tag = msg.tag;
      return result;
    }
    case QueryKind::SearchUsers: {
      result.ok = true;
      if (query.limit == 0) {
        return result;
      }
      std::vector<UserId> candidates;
      if (query.max_hops == 0) {
        candidates.reserve(world.users.size());
        for (const auto& [id, _] : world.users) {
          if (id != actor) {
            candidates.push_back(id);
          }
        }
      } else {
        candidates = bfs_within_hops(world, actor, query.max_hops);
      }
      for (UserId id : candidates) {
        if (result.users.size() >= query.limit) {
          break;
        }
        const UserProfile& profile = world.users.at(id);
        if (fully_isolated && profile.partition == Partition::Protected) {
          continue;
        }
        if (!can_view_profile(world, actor, id, faults)) {
          continue;
        }
        if (query.filter.vulnerable.has_value() &&
            profile.vulnerable != *query.filter.vulnerable) {
          continue;
        }
        result.users.push_back(id);
      }
      return result;
    }
  }
  return deny(DenyReason::InvalidTarget);
}

std::vector<Event> visible_events(const WorldState& world, UserId user, EventSeq since) {
  std::vector<Event> out;
  for (const Event& ev : world.events) {
    if (ev.seq > since && ev.visibility.contains(user)) {
      out.push_back(ev);
    }
  }
  return out;
}

namespace {

void hash_profile(HashSink& sink, const UserProfile& profile) {
  sink.u32(profile.id);
  sink.u8(static_cast<std::uint8_t>(profile.partition));
  sink.boolean(profile.vulnerable);
  sink.boolean(profile.bad_actor);
  sink.u8(static_cast<std::uint8_t>(profile.profile_visibility));
}

void hash_post(HashSink& sink, const Post& post) {
  sink.u64(post.id);
  sink.u32(post.author);
  sink.u8(post.tag);
  sink.u8(static_cast<std::uint8_t>(post.visibility));
}

void hash_message(HashSink& sink, const Message& msg) {
  sink.u64(msg.id);
  sink.u32(msg.sender);
  sink.u32(msg.recipient);
  sink.u8(msg.tag);
  sink.boolean(msg.fetched);
}

void hash_notifications(HashSink& sink, UserId user,
                        const std::vector<Notification>& queue) {
  sink.u32(user);
  sink.u64(queue.size());
  for (const Notification& n : queue) {
    sink.u64(n.tick);
    sink.u8(static_cast<std::uint8_t>(n.kind));
    sink.u32(n.from);
    sink.u64(n.entity);
  }
}

}  // namespace

std::uint64_t state_hash(const WorldState& world) {
  HashSink sink;
  sink.tag('U');
  sink.u64(world.users.size());
  for (const auto& [_, profile] : world.users) {
    hash_profile(sink, profile);
  }
  sink.tag('E');
  for (const auto& [user, neighbors] : world.adjacency) {
    for (UserId n : neighbors) {
      if (user < n) {
        sink.u32(user);
        sink.u32(n);
      }
    }
  }
  sink.tag('P');
  for (const auto& [from, to] : world.pending) {
    sink.u32(from);
    sink.u32(to);
  }
  sink.tag('G');
  for (const auto& [id, members] : world.groups) {
    sink.u32(id);
    sink.u64(members.size());
    for (UserId m : members) {
      sink.u32(m);
    }
  }
  sink.tag('O');
  for (const auto& [_, post] : world.posts) {
    hash_post(sink, post);
  }
  sink.tag('M');
  for (const auto& [_, msg] : world.messages) {
    hash_message(sink, msg);
  }
  sink.tag('N');
  for (const auto& [user, queue] : world.notifications) {
    if (!queue.empty()) {
      hash_notifications(sink, user, queue);
    }
  }
  sink.tag('C');
  sink.u64(world.next_post_id);
  sink.u64(world.next_message_id);
  sink.u32(world.next_group_id);
  sink.u64(world.action_counter);
  return sink.digest();
}

std::uint64_t partition_hash(const WorldState& world, Partition partition) {
  HashSink sink;
  if (partition == Partition::Protected) {
    sink.tag('U');
    sink.u64(world.protected_users.size());
    for (UserId id : world.protected_users) {
      hash_profile(sink, world.users.at(id));
    }
    sink.tag('E');
    for (const auto& [a, b] : world.protected_edges) {
      sink.u32(a);
      sink.u32(b);
    }
    sink.tag('P');
    for (const auto& [from, to] : world.protected_pending) {
      sink.u32(from);
      sink.u32(to);
    }
    sink.tag('G');
    for (const auto& [id, members] : world.groups) {
      for (UserId m : members) {
        if (world.is_protected(m)) {
          sink.u32(id);
          sink.u32(m);
        }
      }
    }
    sink.tag('O');
    for (PostId id : world.protected_posts) {
      hash_post(sink, world.posts.at(id));
    }
    sink.tag('M');
    for (MessageId id : world.protected_messages) {
      hash_message(sink, world.messages.at(id));
    }
    sink.tag('N');
    for (UserId id : world.protected_users) {
      auto it = world.notifications.find(id);
      if (it != world.notifications.end() && !it->second.empty()) {
        hash_notifications(sink, id, it->second);
      }
    }
    return sink.digest();
  }

  // Synthetic partition: filtered scan.
  sink.tag('U');
  for (const auto& [id, profile] : world.users) {
    if (profile.partition == partition) {
      hash_profile(sink, profile);
    }
  }
  sink.tag('E');
  for (const auto& [user, neighbors] : world.adjacency) {
    for (UserId n : neighbors) {
      if (user < n && !world.is_protected(user) && !world.is_protected(n)) {
        sink.u32(user);
        sink.u32(n);
      }
    }
  }
  sink.tag('P');
  for (const auto& [from, to] : world.pending) {
    if (!world.is_protected(from) && !world.is_protected(to)) {
      sink.u32(from);
      sink.u32(to);
    }
  }
  sink.tag('G');
  for (const auto& [id, members] : world.groups) {
    for (UserId m : members) {
      if (!world.is_protected(m)) {
        sink.u32(id);
        sink.u32(m);
      }
    }
  }
  sink.tag('O');
  for (const auto& [id, post] : world.posts) {
    if (!world.is_protected(post.author)) {
      hash_post(sink, post);
    }
  }
  sink.tag('M');
  for (const auto& [id, msg] : world.messages) {
    if (!world.is_protected(msg.sender) && !world.is_protected(msg.recipient)) {
      hash_message(sink, msg);
    }
  }
  sink.tag('N');
  for (const auto& [user, queue] : world.notifications) {
    if (!world.is_protected(user) && !queue.empty()) {
      hash_notifications(sink, user, queue);
    }
  }
  return sink.digest();
}

WorldState replay_log(const WorldState& initial, std::span<const Event> events) {
  WorldState world = initial;
  for (const Event& ev : events) {
    const ActionOutcome outcome =
        apply_action(world, ev.actor, BotClass::Writer, ev.action, ev.vtime, ev.origin);
    if (!outcome.applied) {
      throw std::runtime_error(std::string("replay_log: event ") +
                               std::to_string(ev.seq) + " failed to re-apply: " +
                               to_string(outcome.reason));
    }
  }
  return world;
}

}  // namespace wes::platform
