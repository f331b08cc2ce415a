#pragma once

namespace objnav {

// Discrete action set: forward translates 0.25 m, turns rotate 30 degrees.
enum class ActionKind { forward, turn_left, turn_right, stop };

inline constexpr double k_forward_step_m = 0.25;
inline constexpr double k_turn_step_rad = 0.5235987755982988;  // 30 deg

const char* action_name(ActionKind kind);
ActionKind action_from_name(const char* name);

}  // namespace objnav
