#pragma once
// The social-platform substrate: world state, state-changing actions, pure
// observations, visibility-scoped events, per-entity privacy rules and
// isolation-class enforcement. All operations are deterministic functions of
// (state, inputs); observations take the world by const reference and cannot
// mutate it.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wes/rng.hpp"

namespace wes::platform {

using UserId = std::uint32_t;
using PostId = std::uint64_t;
using MessageId = std::uint64_t;
using GroupId = std::uint32_t;
using Tick = std::uint64_t;
using EventSeq = std::uint64_t;
using ContentTag = std::uint8_t;

// Content is abstract tags, not text; tag 7 stands in for policy-violating
// content.
inline constexpr ContentTag kContentTagCount = 8;
inline constexpr ContentTag kViolatingTag = 7;

enum class Partition : std::uint8_t { Synthetic = 0, Protected = 1 };

enum class BotClass : std::uint8_t { ReadOnly = 0, Writer = 1, FullyIsolated = 2 };

enum class Visibility : std::uint8_t { Public = 0, FriendsOnly = 1, OwnerOnly = 2 };

enum class Origin : std::uint8_t { Bot = 0, RealUser = 1 };

enum class ActionKind : std::uint8_t {
  SendFriendRequest = 0,
  AcceptFriendRequest = 1,
  CreatePost = 2,
  SendMessage = 3,
  GetMessage = 4,
  JoinGroup = 5,
  ShareData = 6,
};

inline constexpr int kActionKindCount = 7;

const char* to_string(ActionKind kind);
const char* to_string(Visibility vis);
const char* to_string(Origin origin);
std::optional<ActionKind> action_kind_from_string(std::string_view name);
std::optional<Visibility> visibility_from_string(std::string_view name);

// Tagged union of everything a bot can do. Field use depends on kind; the
// named constructors are the supported way to build one.
struct Action {
  ActionKind kind = ActionKind::SendFriendRequest;
  UserId peer = 0;          // request target / accepted requester / recipient
  ContentTag tag = 0;       // CreatePost, SendMessage
  Visibility privacy = Visibility::Public;  // CreatePost
  MessageId message = 0;    // GetMessage
  GroupId group = 0;        // JoinGroup
  PostId entity = 0;        // ShareData

  int ordinal() const { return static_cast<int>(kind); }

  static Action send_friend_request(UserId to);
  static Action accept_friend_request(UserId from);
  static Action create_post(ContentTag tag, Visibility privacy);
  static Action send_message(UserId to, ContentTag tag);
  static Action get_message(MessageId id);
  static Action join_group(GroupId g);
  static Action share_data(PostId entity, UserId to);
};

enum class DenyReason : std::uint8_t {
  None = 0,
  IsolationViolation,
  PrivacyDenied,
  UnknownEntity,
  AlreadyFetched,
  NotRecipient,
  Duplicate,
  InvalidTarget,
  RateLimited,
  Masked,
  DroppedByFault,
};

const char* to_string(DenyReason reason);

struct MessageHandle {
  MessageId id = 0;
};

struct ActionOutcome {
  bool applied = false;
  DenyReason reason = DenyReason::None;
  // Post or message id when the action created one.
  std::optional<std::uint64_t> created;
  std::optional<MessageHandle> handle;  // GetMessage

  static ActionOutcome ok() { return {true, DenyReason::None, std::nullopt, std::nullopt}; }
  static ActionOutcome denied(DenyReason r) { return {false, r, std::nullopt, std::nullopt}; }
};

// Who can see an event. Public posts target every user, which is stored as
// the `all` marker rather than materializing the id list.
struct VisibilitySet {
  bool all = false;
  std::vector<UserId> ids;  // sorted ascending when !all

  bool contains(UserId user) const;
};

struct Event {
  EventSeq seq = 0;
  Tick vtime = 0;
  UserId actor = 0;
  Action action;
  ActionOutcome outcome;
  std::vector<std::uint64_t> affected;
  VisibilitySet visibility;
  Origin origin = Origin::Bot;
};

enum class NotificationKind : std::uint8_t {
  FriendRequest = 0,
  RequestAccepted = 1,
  NewMessage = 2,
  MessageRead = 3,
  Share = 4,
};

struct Notification {
  Tick tick = 0;
  NotificationKind kind = NotificationKind::FriendRequest;
  UserId from = 0;
  std::uint64_t entity = 0;
};

struct UserProfile {
  UserId id = 0;
  Partition partition = Partition::Synthetic;
  bool vulnerable = false;
  bool bad_actor = false;
  Visibility profile_visibility = Visibility::Public;
};

struct Post {
  PostId id = 0;
  UserId author = 0;
  ContentTag tag = 0;
  Visibility visibility = Visibility::Public;
};

struct Message {
  MessageId id = 0;
  UserId sender = 0;
  UserId recipient = 0;
  ContentTag tag = 0;
  bool fetched = false;
};

// Injectable platform faults for social testing. The default configuration
// is fault-free and must behave identically to a build without the hooks.
struct FaultConfig {
  double message_drop_p = 0.0;
  bool privacy_downgrade = false;  // FriendsOnly treated as Public on reads
  double notification_loss_p = 0.0;

  bool any() const {
    return message_drop_p > 0.0 || privacy_downgrade || notification_loss_p > 0.0;
  }
};

struct WorldState {
  std::map<UserId, UserProfile> users;
  std::map<UserId, std::set<UserId>> adjacency;     // undirected friendship
  std::set<std::pair<UserId, UserId>> pending;      // (from, to) friend requests
  std::map<GroupId, std::set<UserId>> groups;
  std::map<PostId, Post> posts;
  std::map<MessageId, Message> messages;
  std::map<UserId, std::vector<Notification>> notifications;  // append-only
  std::vector<Event> events;                                  // append-only

  PostId next_post_id = 1;
  MessageId next_message_id = 1;
  GroupId next_group_id = 1;
  std::uint64_t action_counter = 0;

  // Indexes of entities that touch the Protected partition, maintained by the
  // mutators so the partition-scoped hash stays O(partition size).
  std::set<UserId> protected_users;
  std::set<std::pair<UserId, UserId>> protected_edges;
  std::set<std::pair<UserId, UserId>> protected_pending;
  std::set<PostId> protected_posts;
  std::set<MessageId> protected_messages;

  bool has_user(UserId id) const { return users.count(id) > 0; }
  bool are_friends(UserId a, UserId b) const;
  Partition partition_of(UserId id) const { return users.at(id).partition; }
  bool is_protected(UserId id) const {
    auto it = users.find(id);
    return it != users.end() && it->second.partition == Partition::Protected;
  }
  std::size_t edge_count() const;
  UserId max_user_id() const { return users.empty() ? 0 : users.rbegin()->first; }
};

// Setup-time mutators (world construction, before any episode events).
UserId add_user(WorldState& world, const UserProfile& profile);
void add_friendship(WorldState& world, UserId a, UserId b);
GroupId add_group(WorldState& world, std::span<const UserId> members);

// --- Observations -----------------------------------------------------------

enum class QueryKind : std::uint8_t {
  ReadMessage = 0,
  ViewPost = 1,
  ViewProfile = 2,
  ListFriends = 3,
  SearchUsers = 4,
};

const char* to_string(QueryKind kind);

struct TraitFilter {
  std::optional<bool> vulnerable;
};

struct ObservationQuery {
  QueryKind kind = QueryKind::ViewProfile;
  MessageId message = 0;  // ReadMessage handle
  PostId post = 0;
  UserId user = 0;
  TraitFilter filter;            // SearchUsers
  std::uint32_t limit = 0;       // SearchUsers
  std::uint32_t max_hops = 0;    // SearchUsers; 0 = unrestricted

  static ObservationQuery read_message(MessageHandle handle);
  static ObservationQuery view_post(PostId id);
  static ObservationQuery view_profile(UserId id);
  static ObservationQuery list_friends(UserId id);
  static ObservationQuery search_users(TraitFilter filter, std::uint32_t limit,
                                       std::uint32_t max_hops = 0);
};

struct ObservationResult {
  bool ok = false;
  DenyReason reason = DenyReason::None;
  QueryKind kind = QueryKind::ViewProfile;
  std::optional<UserProfile> profile;
  std::optional<Post> post;
  std::optional<ContentTag> message_tag;
  std::vector<UserId> users;  // ListFriends / SearchUsers, ascending
};

// --- Operations -------------------------------------------------------------

// Applies one action. On success exactly the documented state delta occurs and
// one event is appended; on denial the world is untouched and the outcome
// carries the reason. Denials are values, not exceptions.
ActionOutcome apply_action(WorldState& world, UserId actor, BotClass bot_class,
                           const Action& action, Tick vtime,
                           Origin origin = Origin::Bot,
                           const FaultConfig* faults = nullptr,
                           Rng* fault_rng = nullptr);

// The state-changing half of "read a message": flips the fetched flag once
// and notifies the sender. Reading the content afterwards is an observation.
ActionOutcome get_message(WorldState& world, UserId actor, MessageId id, Tick vtime,
                          Origin origin = Origin::Bot);

// Pure query; never mutates the world. Results are filtered by privacy policy
// and isolation class.
ObservationResult observe(const WorldState& world, UserId actor, BotClass bot_class,
                          const ObservationQuery& query,
                          const FaultConfig* faults = nullptr);

// Events whose visibility set contains `user`, with seq > since, in order.
std::vector<Event> visible_events(const WorldState& world, UserId user, EventSeq since);

// Canonical full-state hash (documented fixed serialization + FNV-1a 64).
std::uint64_t state_hash(const WorldState& world);

// Hash of the slice of state belonging to one partition.
std::uint64_t partition_hash(const WorldState& world, Partition partition);

// Event-sourcing round trip: re-applies a log on top of an initial world.
// Throws std::runtime_error if any event fails to re-apply.
WorldState replay_log(const WorldState& initial, std::span<const Event> events);

}  // namespace wes::platform
