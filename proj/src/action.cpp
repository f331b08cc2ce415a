#include "objnav/action.hpp"

#include <stdexcept>

namespace objnav {

const char* action_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::forward: return "forward";
    case ActionKind::turn_left: return "turn_left";
    case ActionKind::turn_right: return "turn_right";
    case ActionKind::stop: return "stop";
  }
  throw std::logic_error("bad ActionKind");
}

ActionKind action_from_name(const std::string& name) {
  if (name == "forward") return ActionKind::forward;
  if (name == "turn_left") return ActionKind::turn_left;
  if (name == "turn_right") return ActionKind::turn_right;
  if (name == "stop") return ActionKind::stop;
  throw std::invalid_argument("unknown action: " + name);
}

}  // namespace objnav
