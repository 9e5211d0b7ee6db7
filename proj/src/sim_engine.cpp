#include "swarmload/sim/engine.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "swarmload/errors.hpp"
#include "swarmload/rng.hpp"

namespace swarmload::sim {

namespace {

constexpr std::int32_t kNoOccupant = -1;

int sign(int v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

/// Cells at Chebyshev distance d from the origin in a fixed scan order.
void ring_offsets(int d, std::vector<GridPos>& out) {
  out.clear();
  if (d == 0) {
    out.push_back({0, 0});
    return;
  }
  for (int dy = -d; dy <= d; ++dy) {
    for (int dx = -d; dx <= d; ++dx) {
      if (std::max(std::abs(dx), std::abs(dy)) == d) out.push_back({dx, dy});
    }
  }
}

}  // namespace

Simulation::Simulation(ScenarioScript script) : script_(std::move(script)) {
  vehicles_ = script_.fleet;
  std::sort(vehicles_.begin(), vehicles_.end(),
            [](const Vehicle& a, const Vehicle& b) { return a.id < b.id; });
  artifacts_ = script_.artifacts;
  std::sort(artifacts_.begin(), artifacts_.end(),
            [](const Artifact& a, const Artifact& b) { return a.id < b.id; });
  nodes_.resize(script_.plan.nodes.size());
  for (const auto& name : script_.plan.signals) signals_fired_[name] = false;

  const std::size_t cells =
      static_cast<std::size_t>(script_.map.width) * script_.map.height * 3;
  occupant_grid_.assign(cells, kNoOccupant);  // flattened [band][y][x]
  occupant_stamp_.assign(cells, 0);          // stamp grid, parallel
}

Vehicle* Simulation::find_vehicle(int id) {
  const auto it = std::lower_bound(
      vehicles_.begin(), vehicles_.end(), id,
      [](const Vehicle& v, int key) { return v.id < key; });
  return it != vehicles_.end() && it->id == id ? &*it : nullptr;
}

const Vehicle* Simulation::find_vehicle(int id) const {
  return const_cast<Simulation*>(this)->find_vehicle(id);
}

Tactic* Simulation::find_tactic(int id) {
  for (auto& tactic : tactics_) {
    if (tactic.id == id) return &tactic;
  }
  return nullptr;
}

Event Simulation::base_event(EventType type) const {
  Event event;
  event.t = now();
  event.type = type;
  return event;
}

VehicleRef Simulation::ref(const Vehicle& vehicle) const {
  return {vehicle.id, vehicle.kind, vehicle.inst};
}

void Simulation::push(Event event) { events_.push_back(std::move(event)); }

void Simulation::warn(std::string message) {
  warnings_.push_back(std::move(message));
}

// ---------------------------------------------------------------------------
// geometry and routing

GridPos Simulation::tactic_goal(const TacticSpec& spec) const {
  if (spec.target.point) return *spec.target.point;
  if (spec.target.building_id) {
    if (const auto* building = script_.map.building(*spec.target.building_id)) {
      return building->bounds.center();
    }
  }
  if (!spec.target.polygon.empty()) {
    long sx = 0, sy = 0;
    for (const auto& vertex : spec.target.polygon) {
      sx += vertex.x;
      sy += vertex.y;
    }
    const auto n = static_cast<long>(spec.target.polygon.size());
    return {static_cast<int>(sx / n), static_cast<int>(sy / n)};
  }
  if (spec.kind == TacticKind::Rtl) return script_.map.launch_zone.center();
  return script_.map.launch_zone.center();
}

std::optional<GridPos> Simulation::egress_cell(GridPos inside) const {
  const auto* building = script_.map.building_at(inside);
  if (building == nullptr) return std::nullopt;
  // nearest cell outside the structure, scanning outward from the door
  std::vector<GridPos> ring;
  for (int d = 1; d <= std::max(script_.map.width, script_.map.height); ++d) {
    ring_offsets(d, ring);
    for (const auto& offset : ring) {
      const GridPos cell{building->door.x + offset.x, building->door.y + offset.y};
      if (!script_.map.in_bounds(cell)) continue;
      if (script_.map.building_at(cell) == nullptr) return cell;
    }
  }
  return std::nullopt;
}

bool Simulation::cell_walkable(GridPos cell, AltitudeBand band,
                               const Building* target) const {
  if (!script_.map.in_bounds(cell)) return false;
  if (band == AltitudeBand::Enroute) return true;
  const auto* building = script_.map.building_at(cell);
  if (building == nullptr) return true;
  // a ground vehicle may enter the building it is tasked into
  return band == AltitudeBand::Ground && target != nullptr && building->id == target->id;
}

std::vector<GridPos> Simulation::assignment_posts(const TacticSpec& spec,
                                                  std::size_t n) const {
  std::vector<GridPos> posts;
  const GridPos center = tactic_goal(spec);
  const Building* building =
      spec.target.building_id ? script_.map.building(*spec.target.building_id) : nullptr;
  const bool interior = spec.kind == TacticKind::Explore && building != nullptr;

  std::vector<GridPos> ring;
  for (int d = 0; d <= std::max(script_.map.width, script_.map.height) && posts.size() < n;
       ++d) {
    ring_offsets(d, ring);
    for (const auto& offset : ring) {
      if (posts.size() >= n) break;
      const GridPos cell{center.x + offset.x, center.y + offset.y};
      if (!script_.map.in_bounds(cell)) continue;
      const auto* at = script_.map.building_at(cell);
      if (interior) {
        if (at == nullptr || at->id != building->id) continue;
      } else if (at != nullptr) {
        continue;  // posts sit outside structures
      }
      posts.push_back(cell);
    }
  }
  while (posts.size() < n) posts.push_back(center);  // degenerate map fallback
  return posts;
}

std::vector<GridPos> Simulation::plan_path(const Vehicle& vehicle, GridPos goal,
                                           const std::vector<GridPos>& avoid) const {
  std::vector<GridPos> path;
  if (vehicle.pos == goal) return path;

  if (vehicle.kind == VehicleKind::Uav) {
    // UAV travel happens at the enroute band: obstacle-free straight walk.
    GridPos at = vehicle.pos;
    while (at != goal) {
      at.x += sign(goal.x - at.x);
      at.y += sign(goal.y - at.y);
      path.push_back(at);
    }
    return path;
  }

  // Ground A*, 4-connected. The buildings holding the goal and the start
  // (a vehicle may need to leave one) are enterable; all others block.
  const Building* goal_building = script_.map.building_at(goal);
  const Building* start_building = script_.map.building_at(vehicle.pos);
  const auto ground_ok = [&](GridPos cell) {
    if (!script_.map.in_bounds(cell)) return false;
    const auto* at = script_.map.building_at(cell);
    if (at == nullptr) return true;
    return (goal_building != nullptr && at->id == goal_building->id) ||
           (start_building != nullptr && at->id == start_building->id);
  };
  const int width = script_.map.width;
  const int height = script_.map.height;
  const auto index = [width](GridPos p) { return p.y * width + p.x; };

  std::set<int> avoid_set;
  for (const auto& cell : avoid) avoid_set.insert(index(cell));

  struct Node {
    int f;
    int g;
    int seq;
    GridPos pos;
    bool operator>(const Node& other) const {
      if (f != other.f) return f > other.f;
      if (g != other.g) return g > other.g;
      return seq > other.seq;
    }
  };
  const auto heuristic = [goal](GridPos p) {
    return std::abs(p.x - goal.x) + std::abs(p.y - goal.y);
  };

  std::vector<int> best_g(static_cast<std::size_t>(width) * height,
                          std::numeric_limits<int>::max());
  std::vector<int> parent(static_cast<std::size_t>(width) * height, -1);
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  int seq = 0;
  best_g[index(vehicle.pos)] = 0;
  open.push({heuristic(vehicle.pos), 0, seq++, vehicle.pos});

  static constexpr GridPos kSteps[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
  bool found = false;
  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    if (node.pos == goal) {
      found = true;
      break;
    }
    if (node.g > best_g[index(node.pos)]) continue;
    for (const auto& step : kSteps) {
      const GridPos next{node.pos.x + step.x, node.pos.y + step.y};
      if (!ground_ok(next)) continue;
      if (next != goal && avoid_set.count(index(next)) > 0) continue;
      const int g = node.g + 1;
      if (g >= best_g[index(next)]) continue;
      best_g[index(next)] = g;
      parent[index(next)] = index(node.pos);
      open.push({g + heuristic(next), g, seq++, next});
    }
  }
  if (!found) return path;

  int at = index(goal);
  const int start = index(vehicle.pos);
  while (at != start) {
    path.push_back({at % width, at / width});
    at = parent[at];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void Simulation::route_vehicle(Vehicle& vehicle, GridPos goal) {
  vehicle.goal = goal;
  vehicle.path = plan_path(vehicle, goal, {});
  vehicle.path_index = 0;
  vehicle.blocked_ticks = 0;
}

void Simulation::send_home(Vehicle& vehicle) {
  // stable per-vehicle parking cell so returns do not pile onto one square
  const auto& zone = script_.map.launch_zone;
  const int width = zone.x1 - zone.x0 + 1;
  const int height = zone.y1 - zone.y0 + 1;
  const int slot = (vehicle.id - 1) % (width * height);
  route_vehicle(vehicle, {zone.x0 + slot % width, zone.y0 + slot / width});
  if (!vehicle.neutralized()) {
    vehicle.status = VehicleStatus::ReturningToLaunch;
    push([&] {
      Event event = base_event(EventType::Rtl);
      event.vehicle = ref(vehicle);
      return event;
    }());
  }
  vehicle.blocked_flag = false;
  vehicle.hold_ticks = 0;
}

// ---------------------------------------------------------------------------
// dispatcher

AllocationResult Simulation::allocate(const TacticSpec& spec) const {
  AllocationResult result;
  const GridPos goal = tactic_goal(spec);

  if (!spec.explicit_vehicles.empty()) {
    // Explicit lists bypass selection but are still validated.
    std::vector<const Vehicle*> chosen;
    for (const int id : spec.explicit_vehicles) {
      const auto* vehicle = find_vehicle(id);
      if (vehicle == nullptr) {
        result.failure = "unknown vehicle " + std::to_string(id);
        return result;
      }
      if (vehicle->neutralized()) {
        result.failure = "vehicle " + std::to_string(id) + " is neutralized";
        return result;
      }
      if (!vehicle->connected) {
        result.failure = "vehicle " + std::to_string(id) + " is out of communication";
        return result;
      }
      chosen.push_back(vehicle);
    }
    if (spec.requirements.empty()) {
      for (const auto* vehicle : chosen) {
        result.vehicles.push_back(vehicle->id);
        result.slot_of.push_back(-1);
      }
      result.ok = true;
      return result;
    }
    // capability check: greedily match the explicit list against the slots
    std::vector<bool> used(chosen.size(), false);
    for (std::size_t s = 0; s < spec.requirements.size(); ++s) {
      const auto& slot = spec.requirements[s];
      int need = slot.count;
      for (std::size_t i = 0; i < chosen.size() && need > 0; ++i) {
        if (used[i]) continue;
        const auto* v = chosen[i];
        if (slot.kind && v->kind != *slot.kind) continue;
        if (slot.camera && !v->has_camera(*slot.camera)) continue;
        if (slot.payload && v->payload != *slot.payload) continue;
        used[i] = true;
        result.vehicles.push_back(v->id);
        result.slot_of.push_back(static_cast<int>(s));
        --need;
      }
      if (need > 0) {
        result.vehicles.clear();
        result.slot_of.clear();
        result.failure = "explicit vehicles do not satisfy requirement slot " +
                         std::to_string(s);
        return result;
      }
    }
    result.ok = true;
    return result;
  }

  // Dispatcher selection: qualified idle connected vehicles, closest first.
  std::vector<const Vehicle*> candidates;
  for (const auto& vehicle : vehicles_) {
    if (vehicle.status != VehicleStatus::Idle) continue;
    if (!vehicle.connected || vehicle.neutralized()) continue;
    if (vehicle.kind == VehicleKind::Uav &&
        vehicle.battery <= script_.tuning.swap_battery_fraction + 0.05) {
      continue;  // not enough margin to accept a task
    }
    candidates.push_back(&vehicle);
  }
  std::sort(candidates.begin(), candidates.end(),
            [goal](const Vehicle* a, const Vehicle* b) {
              const int da = grid_distance(a->pos, goal);
              const int db = grid_distance(b->pos, goal);
              if (da != db) return da < db;
              return a->id < b->id;
            });

  std::vector<bool> used(candidates.size(), false);
  const auto& slots = spec.requirements;
  if (slots.empty()) {
    // no constraints given: a single nearest vehicle
    if (candidates.empty()) {
      result.failure = "no qualified vehicle available";
      return result;
    }
    result.vehicles.push_back(candidates.front()->id);
    result.slot_of.push_back(-1);
    result.ok = true;
    return result;
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& slot = slots[s];
    int need = slot.count;
    for (std::size_t i = 0; i < candidates.size() && need > 0; ++i) {
      if (used[i]) continue;
      const auto* v = candidates[i];
      if (slot.kind && v->kind != *slot.kind) continue;
      if (slot.camera && !v->has_camera(*slot.camera)) continue;
      if (slot.payload && v->payload != *slot.payload) continue;
      used[i] = true;
      result.vehicles.push_back(v->id);
      result.slot_of.push_back(static_cast<int>(s));
      --need;
    }
    if (need > 0) {
      result.vehicles.clear();
      result.slot_of.clear();
      result.failure = "insufficient qualified vehicles for slot " + std::to_string(s);
      return result;
    }
  }
  result.ok = true;
  return result;
}

int Simulation::create_and_issue_tactic(const TacticSpec& spec, TacticOrigin origin) {
  Tactic tactic;
  tactic.id = next_tactic_id_++;
  tactic.spec = spec;
  tactic.origin = origin;
  tactic.lifecycle = TacticLifecycle::Created;

  Event created = base_event(EventType::TacticCreated);
  created.tactic_id = tactic.id;
  created.tactic_kind = spec.kind;
  created.origin = origin;
  push(created);

  const auto emit_issued = [&](const Tactic& t) {
    Event issued = base_event(EventType::TacticIssued);
    issued.tactic_id = t.id;
    issued.tactic_kind = t.spec.kind;
    issued.origin = t.origin;
    for (const int id : t.assigned) {
      if (const auto* v = find_vehicle(id)) issued.assigned.push_back(ref(*v));
    }
    push(issued);
    ++summary_.tactics_issued;
    recent_issued_.push_back(now());
  };
  const auto fail = [&](const std::string& reason) {
    Event failure = base_event(EventType::AllocationFailed);
    failure.tactic_id = tactic.id;
    failure.detail = reason;
    push(failure);
    Event failed = base_event(EventType::TacticFailed);
    failed.tactic_id = tactic.id;
    failed.tactic_kind = spec.kind;
    failed.origin = origin;
    failed.detail = reason;
    push(failed);
    tactic.lifecycle = TacticLifecycle::Failed;
    ++summary_.tactics_failed;
    tactics_.push_back(tactic);
    return tactic.id;
  };

  if (spec.kind == TacticKind::Nudge || spec.kind == TacticKind::Stop) {
    // instantaneous commands; they act on the explicit vehicles
    tactic.assigned = spec.explicit_vehicles;
    tactic.assigned_slots.assign(tactic.assigned.size(), -1);
    emit_issued(tactic);
    for (const int id : spec.explicit_vehicles) {
      if (spec.kind == TacticKind::Nudge) {
        nudge(id);
      } else {
        stop_vehicle(id);
      }
    }
    tactic.lifecycle = TacticLifecycle::Completed;
    Event completed = base_event(EventType::TacticCompleted);
    completed.tactic_id = tactic.id;
    completed.tactic_kind = spec.kind;
    completed.origin = origin;
    push(completed);
    ++summary_.tactics_completed;
    tactics_.push_back(tactic);
    return tactic.id;
  }

  const auto allocation = allocate(spec);
  if (!allocation.ok) return fail(allocation.failure);

  tactic.assigned = allocation.vehicles;
  tactic.assigned_slots = allocation.slot_of;

  if (spec.kind == TacticKind::Rtl) {
    emit_issued(tactic);
    tactic.lifecycle = TacticLifecycle::Executing;
    for (const int id : tactic.assigned) {
      auto* vehicle = find_vehicle(id);
      remove_from_tactic(*vehicle, true);
      vehicle->tactic_id = tactic.id;
      send_home(*vehicle);
    }
    tactics_.push_back(tactic);
    return tactic.id;
  }

  const auto posts = assignment_posts(spec, tactic.assigned.size());
  const int hold = spec.kind == TacticKind::Surveil ? script_.tuning.surveil_hold_s
                   : spec.kind == TacticKind::Cordon ? script_.tuning.cordon_hold_s
                   : spec.kind == TacticKind::Explore ? script_.tuning.surveil_hold_s
                                                      : 0;
  for (std::size_t i = 0; i < tactic.assigned.size(); ++i) {
    auto* vehicle = find_vehicle(tactic.assigned[i]);
    remove_from_tactic(*vehicle, true);  // explicit tasking preempts
    vehicle->tactic_id = tactic.id;
    vehicle->status = VehicleStatus::Tasked;
    vehicle->hold_ticks = hold;
    vehicle->swap_requested = false;
    route_vehicle(*vehicle, posts[i]);
  }
  emit_issued(tactic);
  tactic.lifecycle = TacticLifecycle::Executing;
  tactics_.push_back(tactic);
  return tactic.id;
}

// ---------------------------------------------------------------------------
// mission plan

void Simulation::load_plan() {
  if (plan_loaded_) {
    warn("mission plan already loaded");
    return;
  }
  plan_loaded_ = true;
  for (std::size_t i = 0; i < script_.plan.nodes.size(); ++i) {
    if (node_ready(i)) activate_node(i);
  }
}

bool Simulation::node_ready(std::size_t index) const {
  const auto& node = script_.plan.nodes[index];
  if (nodes_[index].activated) return false;
  if (node.gate_signal) {
    const auto it = signals_fired_.find(*node.gate_signal);
    if (it == signals_fired_.end() || !it->second) return false;
  }
  for (const int pred : node.predecessors) {
    for (std::size_t j = 0; j < script_.plan.nodes.size(); ++j) {
      if (script_.plan.nodes[j].id == pred && !nodes_[j].completed) return false;
    }
  }
  return true;
}

void Simulation::activate_node(std::size_t index) {
  nodes_[index].activated = true;
  for (const auto& spec : script_.plan.nodes[index].tactics) {
    nodes_[index].tactic_ids.push_back(create_and_issue_tactic(spec, TacticOrigin::Plan));
  }
}

void Simulation::issue_signal(const std::string& name) {
  const auto it = signals_fired_.find(name);
  if (it == signals_fired_.end()) {
    throw Error(Errc::ScenarioInvalid, "unknown signal '" + name + "'");
  }
  if (!plan_loaded_) {
    warn("signal '" + name + "' before mission plan load");
    return;
  }
  if (it->second) {
    warn("signal '" + name + "' already fired");
    return;
  }
  it->second = true;
  Event event = base_event(EventType::Signal);
  event.detail = name;
  push(event);
  for (std::size_t i = 0; i < script_.plan.nodes.size(); ++i) {
    if (node_ready(i)) activate_node(i);
  }
}

void Simulation::check_plan_progress() {
  if (!plan_loaded_) return;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < script_.plan.nodes.size(); ++i) {
      auto& state = nodes_[i];
      if (state.activated && !state.completed) {
        const bool done = std::all_of(
            state.tactic_ids.begin(), state.tactic_ids.end(), [&](int id) {
              for (const auto& tactic : tactics_) {
                if (tactic.id == id) return tactic.lifecycle == TacticLifecycle::Completed;
              }
              return false;
            });
        if (done) {
          state.completed = true;
          changed = true;
        }
      }
      if (node_ready(i)) {
        activate_node(i);
        changed = true;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// vehicle commands

void Simulation::nudge(int vehicle_id) {
  auto* vehicle = find_vehicle(vehicle_id);
  if (vehicle == nullptr) {
    warn("nudge: unknown vehicle " + std::to_string(vehicle_id));
    return;
  }
  if (vehicle->neutralized()) {
    warn("nudge rejected: vehicle " + std::to_string(vehicle_id) + " is neutralized");
    return;
  }
  if (vehicle->status != VehicleStatus::Tasked &&
      vehicle->status != VehicleStatus::Blocked &&
      vehicle->status != VehicleStatus::ReturningToLaunch) {
    warn("nudge: vehicle " + std::to_string(vehicle_id) + " is not executing, no-op");
    return;
  }

  if (vehicle->kind == VehicleKind::Uav) {
    if (vehicle->band == AltitudeBand::Ground) {
      vehicle->band = AltitudeBand::BuiltEnv;
    } else {
      vehicle->band = AltitudeBand::Enroute;
    }
  } else {
    // one-cell displacement, clipped to the map and around structures
    static constexpr GridPos kOffsets[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    for (const auto& offset : kOffsets) {
      const GridPos cell{vehicle->pos.x + offset.x, vehicle->pos.y + offset.y};
      if (cell_walkable(cell, AltitudeBand::Ground, nullptr)) {
        vehicle->pos = cell;
        break;
      }
    }
  }
  // replan toward the existing goal
  vehicle->path = plan_path(*vehicle, vehicle->goal, {});
  vehicle->path_index = 0;
  vehicle->blocked_ticks = 0;
  vehicle->blocked_flag = false;
  if (vehicle->status == VehicleStatus::Blocked) vehicle->status = VehicleStatus::Tasked;
}

void Simulation::stop_vehicle(int vehicle_id) {
  auto* vehicle = find_vehicle(vehicle_id);
  if (vehicle == nullptr || vehicle->neutralized()) return;
  remove_from_tactic(*vehicle, true);
  vehicle->status = VehicleStatus::Idle;
  vehicle->path.clear();
  vehicle->path_index = 0;
  vehicle->blocked_flag = false;
  vehicle->hold_ticks = 0;
}

void Simulation::rtl_vehicle(int vehicle_id) {
  auto* vehicle = find_vehicle(vehicle_id);
  if (vehicle == nullptr || vehicle->neutralized()) return;
  remove_from_tactic(*vehicle, true);
  send_home(*vehicle);
}

void Simulation::deploy_medic() {
  for (auto& vehicle : vehicles_) {
    if (!vehicle.neutralized()) continue;
    if (!script_.map.launch_zone.contains(vehicle.pos)) continue;
    vehicle.status = VehicleStatus::Idle;
    vehicle.route_to_medic = false;
    vehicle.revive_ticks = 0;
    vehicle.dwell_ticks = 0;
    vehicle.battery = 1.0;  // batteries swapped during the medic sweep
    vehicle.path.clear();
    vehicle.path_index = 0;
    Event event = base_event(EventType::Revived);
    event.vehicle = ref(vehicle);
    push(event);
  }
}

void Simulation::remove_from_tactic(Vehicle& vehicle, bool may_fail_tactic) {
  if (vehicle.tactic_id < 0) return;
  auto* tactic = find_tactic(vehicle.tactic_id);
  vehicle.tactic_id = -1;
  vehicle.hold_ticks = 0;
  if (tactic == nullptr || tactic->terminal()) return;
  for (std::size_t i = 0; i < tactic->assigned.size(); ++i) {
    if (tactic->assigned[i] == vehicle.id) {
      tactic->assigned.erase(tactic->assigned.begin() + i);
      tactic->assigned_slots.erase(tactic->assigned_slots.begin() + i);
      break;
    }
  }
  if (tactic->assigned.empty() && may_fail_tactic) {
    tactic->lifecycle = TacticLifecycle::Failed;
    Event failed = base_event(EventType::TacticFailed);
    failed.tactic_id = tactic->id;
    failed.tactic_kind = tactic->spec.kind;
    failed.origin = tactic->origin;
    failed.detail = "no vehicles remain";
    push(failed);
    ++summary_.tactics_failed;
  }
}

void Simulation::neutralize_vehicle(Vehicle& vehicle) {
  vehicle.status = VehicleStatus::Neutralized;
  vehicle.blocked_flag = false;
  vehicle.dwell_ticks = 0;
  vehicle.swap_requested = false;
  remove_from_tactic(vehicle, true);
  ++summary_.vehicles_neutralized;
  recent_neutralized_.push_back(now());
  Event event = base_event(EventType::Neutralized);
  event.vehicle = ref(vehicle);
  push(event);

  if (vehicle.kind == VehicleKind::Ugv && medic_detected_) {
    vehicle.route_to_medic = true;
    route_vehicle(vehicle, medic_pos_);
  } else {
    vehicle.route_to_medic = false;
    send_home(vehicle);
  }
}

void Simulation::request_swap(Vehicle& vehicle) {
  vehicle.swap_requested = true;
  ++summary_.swap_requests;
  Event request = base_event(EventType::SwapRequested);
  request.vehicle = ref(vehicle);
  request.tactic_id = vehicle.tactic_id;
  push(request);

  auto* tactic = find_tactic(vehicle.tactic_id);
  int slot = -1;
  if (tactic != nullptr) {
    for (std::size_t i = 0; i < tactic->assigned.size(); ++i) {
      if (tactic->assigned[i] == vehicle.id) slot = tactic->assigned_slots[i];
    }
  }

  // nearest idle UAV with enough charge that can stand in for this slot
  Vehicle* replacement = nullptr;
  int best_distance = std::numeric_limits<int>::max();
  for (auto& candidate : vehicles_) {
    if (candidate.id == vehicle.id || candidate.kind != VehicleKind::Uav) continue;
    if (candidate.status != VehicleStatus::Idle || !candidate.connected ||
        candidate.neutralized() || candidate.battery <= 0.5) {
      continue;
    }
    if (tactic != nullptr && slot >= 0) {
      const auto& req = tactic->spec.requirements[static_cast<std::size_t>(slot)];
      if (req.kind && candidate.kind != *req.kind) continue;
      if (req.camera && !candidate.has_camera(*req.camera)) continue;
      if (req.payload && candidate.payload != *req.payload) continue;
    }
    const int distance = grid_distance(candidate.pos, vehicle.goal);
    if (distance < best_distance ||
        (distance == best_distance &&
         (replacement == nullptr || candidate.id < replacement->id))) {
      best_distance = distance;
      replacement = &candidate;
    }
  }

  const int tactic_id = vehicle.tactic_id;
  const GridPos post = vehicle.goal;
  const int hold = vehicle.hold_ticks;
  if (replacement != nullptr && tactic != nullptr && !tactic->terminal()) {
    tactic->assigned.push_back(replacement->id);
    tactic->assigned_slots.push_back(slot);
    replacement->tactic_id = tactic_id;
    replacement->status = VehicleStatus::Tasked;
    replacement->hold_ticks = hold > 0 ? hold : 0;
    replacement->swap_requested = false;
    route_vehicle(*replacement, post);
    Event completed = base_event(EventType::SwapCompleted);
    completed.vehicle = ref(*replacement);
    completed.tactic_id = tactic_id;
    completed.detail = "relieves " + std::to_string(vehicle.id);
    push(completed);
    remove_from_tactic(vehicle, false);
  } else {
    Event failed = base_event(EventType::AllocationFailed);
    failed.vehicle = ref(vehicle);
    failed.tactic_id = tactic_id;
    failed.detail = "swap: no qualified replacement";
    push(failed);
    remove_from_tactic(vehicle, true);
  }
  send_home(vehicle);
}

// ---------------------------------------------------------------------------
// per-tick machinery

void Simulation::process_actions() {
  // scripted commander timeline
  while (action_index_ < script_.actions.size() &&
         script_.actions[action_index_].t <= now()) {
    const auto& action = script_.actions[action_index_++];
    switch (action.type) {
      case ActionType::LoadPlan:
        load_plan();
        break;
      case ActionType::Signal:
        issue_signal(action.signal_name);
        break;
      case ActionType::AuthorTactic:
        authoring_windows_.push_back({now(), now() + action.authoring_duration});
        pending_authored_.push_back({now() + action.authoring_duration, *action.tactic});
        break;
      case ActionType::IssueTactic:
        create_and_issue_tactic(*action.tactic, TacticOrigin::Commander);
        break;
      case ActionType::Nudge:
        create_and_issue_tactic(
            TacticSpec{TacticKind::Nudge, {}, {}, {action.vehicle_id}},
            TacticOrigin::Commander);
        break;
      case ActionType::Stop:
        create_and_issue_tactic(
            TacticSpec{TacticKind::Stop, {}, {}, {action.vehicle_id}},
            TacticOrigin::Commander);
        break;
      case ActionType::Rtl: {
        TacticSpec spec;
        spec.kind = TacticKind::Rtl;
        spec.explicit_vehicles = {action.vehicle_id};
        create_and_issue_tactic(spec, TacticOrigin::Commander);
        break;
      }
      case ActionType::DeployMedic:
        deploy_medic();
        break;
    }
  }
  // authored tactics whose authoring window just closed
  for (auto it = pending_authored_.begin(); it != pending_authored_.end();) {
    if (it->first <= now()) {
      create_and_issue_tactic(it->second, TacticOrigin::Commander);
      it = pending_authored_.erase(it);
    } else {
      ++it;
    }
  }
}

namespace {

int band_index(AltitudeBand band) { return static_cast<int>(band); }

}  // namespace

void Simulation::move_vehicles() {
  const int width = script_.map.width;
  const int height = script_.map.height;
  const auto cell_index = [&](AltitudeBand band, GridPos p) {
    return (static_cast<std::size_t>(band_index(band)) * height + p.y) * width + p.x;
  };
  // stamp-based occupancy of hardware vehicles; rebuilt lazily per tick
  const std::int64_t stamp = tick_ + 1;
  const auto occupy = [&](AltitudeBand band, GridPos p, std::int32_t id) {
    const auto idx = cell_index(band, p);
    occupant_grid_[idx] = id;
    occupant_stamp_[idx] = static_cast<std::int32_t>(stamp & 0x7fffffff);
  };
  const auto occupant = [&](AltitudeBand band, GridPos p) -> std::int32_t {
    const auto idx = cell_index(band, p);
    if (occupant_stamp_[idx] != static_cast<std::int32_t>(stamp & 0x7fffffff)) {
      return kNoOccupant;
    }
    return occupant_grid_[idx];
  };
  const auto vacate = [&](AltitudeBand band, GridPos p) {
    occupant_grid_[cell_index(band, p)] = kNoOccupant;
  };

  for (const auto& vehicle : vehicles_) {
    if (vehicle.inst == Instantiation::Hardware) {
      occupy(vehicle.band, vehicle.pos, vehicle.id);
    }
  }

  for (auto& vehicle : vehicles_) {
    const bool moving_state =
        vehicle.status == VehicleStatus::Tasked ||
        vehicle.status == VehicleStatus::Blocked ||
        vehicle.status == VehicleStatus::ReturningToLaunch ||
        ((vehicle.status == VehicleStatus::Neutralized ||
          vehicle.status == VehicleStatus::Idle) &&
         vehicle.path_index < vehicle.path.size());
    if (!moving_state) continue;

    const bool hardware = vehicle.inst == Instantiation::Hardware;
    const bool has_path = vehicle.path_index < vehicle.path.size();

    if (vehicle.kind == VehicleKind::Uav) {
      if (has_path && vehicle.band != AltitudeBand::Enroute) {
        // climb one band per tick before traveling
        const auto next_band = vehicle.band == AltitudeBand::Ground
                                   ? AltitudeBand::BuiltEnv
                                   : AltitudeBand::Enroute;
        if (!hardware || occupant(next_band, vehicle.pos) == kNoOccupant) {
          if (hardware) {
            vacate(vehicle.band, vehicle.pos);
            occupy(next_band, vehicle.pos, vehicle.id);
          }
          vehicle.band = next_band;
          vehicle.blocked_ticks = 0;
        } else {
          ++vehicle.blocked_ticks;
        }
        continue;
      }
      if (!has_path && vehicle.band != AltitudeBand::Ground) {
        // descend at the destination: to ground at home, else work altitude
        const bool landing = vehicle.status == VehicleStatus::ReturningToLaunch ||
                             vehicle.status == VehicleStatus::Neutralized ||
                             vehicle.status == VehicleStatus::AtMedic;
        const auto target_band = landing ? AltitudeBand::Ground : AltitudeBand::BuiltEnv;
        if (vehicle.band == AltitudeBand::BuiltEnv && target_band == AltitudeBand::BuiltEnv) {
          // at work altitude already
        } else {
          const auto next_band = vehicle.band == AltitudeBand::Enroute
                                     ? AltitudeBand::BuiltEnv
                                     : AltitudeBand::Ground;
          if (!hardware || occupant(next_band, vehicle.pos) == kNoOccupant) {
            if (hardware) {
              vacate(vehicle.band, vehicle.pos);
              occupy(next_band, vehicle.pos, vehicle.id);
            }
            vehicle.band = next_band;
            vehicle.blocked_ticks = 0;
          } else {
            ++vehicle.blocked_ticks;
          }
          continue;
        }
      }
    }

    if (!has_path) {
      // arrival handling for homebound vehicles
      if (vehicle.pos == vehicle.goal) {
        if (vehicle.status == VehicleStatus::ReturningToLaunch &&
            (vehicle.kind == VehicleKind::Ugv || vehicle.band == AltitudeBand::Ground)) {
          if (vehicle.kind == VehicleKind::Uav &&
              vehicle.battery <= script_.tuning.swap_battery_fraction + 0.05) {
            vehicle.status = VehicleStatus::Charging;
            vehicle.charge_ticks = script_.tuning.battery_swap_s;
          } else {
            vehicle.status = VehicleStatus::Idle;
          }
          vehicle.blocked_flag = false;
        }
      }
      continue;
    }

    const GridPos next = vehicle.path[vehicle.path_index];
    const auto blocker = hardware ? occupant(vehicle.band, next) : kNoOccupant;
    if (blocker == kNoOccupant || blocker == vehicle.id) {
      if (hardware) {
        vacate(vehicle.band, vehicle.pos);
        occupy(vehicle.band, next, vehicle.id);
      }
      vehicle.pos = next;
      ++vehicle.path_index;
      vehicle.blocked_ticks = 0;
      if (vehicle.blocked_flag) {
        vehicle.blocked_flag = false;
        if (vehicle.status == VehicleStatus::Blocked) vehicle.status = VehicleStatus::Tasked;
      }
      continue;
    }

    // conflict: wait, and after the configured patience emit a blockage and
    // attempt an autonomous replan around the blocker
    ++vehicle.blocked_ticks;
    if (vehicle.blocked_ticks > script_.tuning.block_threshold_ticks &&
        vehicle.status != VehicleStatus::Neutralized) {
      if (!vehicle.blocked_flag) {
        vehicle.blocked_flag = true;
        if (vehicle.status == VehicleStatus::Tasked) vehicle.status = VehicleStatus::Blocked;
        ++summary_.blockage_events;
        Event event = base_event(EventType::Blocked);
        event.vehicle = ref(vehicle);
        push(event);
      }
      // right of way goes to the lower id: the junior vehicle holds position
      // unless the stall drags on (a parked blocker), which breaks the
      // symmetric dance of two vehicles replanning around each other forever
      const bool long_stall =
          vehicle.blocked_ticks > 5 * script_.tuning.block_threshold_ticks;
      if (blocker > vehicle.id || long_stall) {
        vehicle.blocked_ticks = 0;
      if (vehicle.kind == VehicleKind::Ugv) {
        std::vector<GridPos> avoid;
        for (const auto& other : vehicles_) {
          if (other.id != vehicle.id && other.inst == Instantiation::Hardware &&
              other.band == vehicle.band) {
            avoid.push_back(other.pos);
          }
        }
        auto detour = plan_path(vehicle, vehicle.goal, avoid);
        if (!detour.empty()) {
          vehicle.path = std::move(detour);
          vehicle.path_index = 0;
        } else {
          // no route around the blockers: sidestep to a free cell and retry
          static constexpr GridPos kSide[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
          for (const auto& step : kSide) {
            const GridPos cell{vehicle.pos.x + step.x, vehicle.pos.y + step.y};
            if (!cell_walkable(cell, vehicle.band, nullptr)) continue;
            if (occupant(vehicle.band, cell) != kNoOccupant) continue;
            vacate(vehicle.band, vehicle.pos);
            occupy(vehicle.band, cell, vehicle.id);
            vehicle.pos = cell;
            vehicle.path = plan_path(vehicle, vehicle.goal, {});
            vehicle.path_index = 0;
            break;
          }
        }
      } else {
        // sidestep to the first free adjacent cell, then continue straight
        static constexpr GridPos kSteps[8] = {{0, -1}, {1, 0},  {0, 1},  {-1, 0},
                                              {1, -1}, {1, 1},  {-1, 1}, {-1, -1}};
        for (const auto& step : kSteps) {
          const GridPos cell{vehicle.pos.x + step.x, vehicle.pos.y + step.y};
          if (!script_.map.in_bounds(cell)) continue;
          if (occupant(vehicle.band, cell) == kNoOccupant) {
            vacate(vehicle.band, vehicle.pos);
            occupy(vehicle.band, cell, vehicle.id);
            vehicle.pos = cell;
            vehicle.path = plan_path(vehicle, vehicle.goal, {});
            vehicle.path_index = 0;
            break;
          }
        }
      }
      }
    }
  }
}

void Simulation::update_batteries() {
  for (auto& vehicle : vehicles_) {
    if (vehicle.status == VehicleStatus::Charging) {
      if (--vehicle.charge_ticks <= 0) {
        vehicle.battery = 1.0;
        vehicle.swap_requested = false;
        vehicle.status = VehicleStatus::Idle;
      }
      continue;
    }
    if (vehicle.kind != VehicleKind::Uav || vehicle.band == AltitudeBand::Ground) continue;
    vehicle.battery = std::max(
        0.0, vehicle.battery - 1.0 / static_cast<double>(vehicle.endurance_s));
    if (vehicle.battery > script_.tuning.swap_battery_fraction) continue;

    if (vehicle.neutralized()) continue;  // already heading home or parked
    if (vehicle.status == VehicleStatus::ReturningToLaunch) continue;
    if (vehicle.tactic_id >= 0 && !vehicle.swap_requested) {
      request_swap(vehicle);
    } else if (vehicle.tactic_id < 0) {
      send_home(vehicle);
    }
  }
}

void Simulation::update_artifacts() {
  // medic arrivals and revive countdowns first
  for (auto& vehicle : vehicles_) {
    if (vehicle.status == VehicleStatus::Neutralized && vehicle.route_to_medic &&
        (vehicle.kind == VehicleKind::Ugv || vehicle.band == AltitudeBand::Ground) &&
        grid_distance(vehicle.pos, medic_pos_) <= 1) {
      vehicle.status = VehicleStatus::AtMedic;
      vehicle.revive_ticks = script_.tuning.revive_delay_s;
    }
    if (vehicle.status == VehicleStatus::AtMedic && vehicle.revive_ticks > 0) {
      if (--vehicle.revive_ticks == 0) {
        vehicle.status = VehicleStatus::Idle;
        vehicle.route_to_medic = false;
        vehicle.dwell_ticks = 0;
        Event event = base_event(EventType::Revived);
        event.vehicle = ref(vehicle);
        push(event);
      }
    }
  }

  // detection sweep
  for (auto& artifact : artifacts_) {
    if (artifact.state != ArtifactState::Hidden) continue;
    for (const auto& vehicle : vehicles_) {
      if (!vehicle.connected || vehicle.neutralized()) continue;
      if (vehicle.camera == CameraFit::None) continue;
      if (grid_distance(vehicle.pos, artifact.pos) > script_.tuning.detect_radius) continue;
      artifact.state = ArtifactState::Detected;
      if (artifact.type == ArtifactType::MedicMarker) {
        medic_detected_ = true;
        medic_pos_ = artifact.pos;
      }
      Event event = base_event(EventType::ArtifactDetected);
      event.artifact_id = artifact.id;
      event.artifact_type = artifact.type;
      event.vehicle = ref(vehicle);
      push(event);
      break;
    }
  }

  // interactions with active artifacts
  std::vector<bool> in_threat(vehicles_.size(), false);
  for (auto& artifact : artifacts_) {
    if (!artifact.active || artifact.state == ArtifactState::Neutralized) continue;
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto& vehicle = vehicles_[i];
      if (vehicle.neutralized()) continue;
      if (vehicle.band == AltitudeBand::Enroute) continue;  // overflight is safe
      if (grid_distance(vehicle.pos, artifact.pos) > artifact.threat_radius) continue;
      inside.push_back(i);
    }
    if (inside.empty()) continue;

    // a payload combination present at the same tick beats the artifact
    bool satisfied = !artifact.required_payloads.empty();
    std::vector<bool> used(inside.size(), false);
    for (const auto required : artifact.required_payloads) {
      bool matched = false;
      for (std::size_t j = 0; j < inside.size(); ++j) {
        if (used[j]) continue;
        if (vehicles_[inside[j]].payload == required) {
          used[j] = true;
          matched = true;
          break;
        }
      }
      if (!matched) {
        satisfied = false;
        break;
      }
    }

    if (satisfied) {
      artifact.state = ArtifactState::Neutralized;
      artifact.active = false;
      ++summary_.artifacts_neutralized;
      Event event = base_event(EventType::ArtifactNeutralized);
      event.artifact_id = artifact.id;
      event.artifact_type = artifact.type;
      event.vehicle = ref(vehicles_[inside.front()]);
      push(event);
      continue;
    }
    for (const auto i : inside) in_threat[i] = true;
  }

  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    auto& vehicle = vehicles_[i];
    if (vehicle.neutralized()) continue;
    if (in_threat[i]) {
      if (++vehicle.dwell_ticks >= script_.tuning.dwell_neutralize_ticks) {
        neutralize_vehicle(vehicle);
      }
    } else {
      vehicle.dwell_ticks = 0;
    }
  }
}

void Simulation::update_comms() {
  for (auto& vehicle : vehicles_) {
    bool connected = true;
    if (vehicle.inst == Instantiation::Hardware) {
      const auto* building = script_.map.building_at(vehicle.pos);
      if (building != nullptr && vehicle.band != AltitudeBand::Enroute) {
        connected = false;  // inside a structure means no line of sight
      } else {
        double dropout = script_.comm.dropout_per_tick;
        for (const auto& zone : script_.comm.zones) {
          if (zone.bounds.contains(vehicle.pos)) {
            dropout = zone.dropout_per_tick;
            break;
          }
        }
        if (dropout > 0.0 &&
            hash_uniform(script_.seed, static_cast<std::uint64_t>(vehicle.id),
                         static_cast<std::uint64_t>(tick_)) < dropout) {
          connected = false;
        }
      }
    }
    if (connected != vehicle.connected) {
      Event event = base_event(connected ? EventType::CommRestore : EventType::CommLoss);
      event.vehicle = ref(vehicle);
      push(event);
      vehicle.connected = connected;
    }
  }
}

void Simulation::update_tactics() {
  for (auto& tactic : tactics_) {
    if (tactic.lifecycle != TacticLifecycle::Executing) continue;

    bool all_done = !tactic.assigned.empty();
    for (const int id : tactic.assigned) {
      auto* vehicle = find_vehicle(id);
      if (vehicle == nullptr) continue;
      if (tactic.spec.kind == TacticKind::Rtl) {
        if (vehicle->status != VehicleStatus::Idle &&
            vehicle->status != VehicleStatus::Charging) {
          all_done = false;
        }
        continue;
      }
      const bool arrived =
          vehicle->path_index >= vehicle->path.size() && vehicle->pos == vehicle->goal &&
          (vehicle->kind == VehicleKind::Ugv || vehicle->band == AltitudeBand::BuiltEnv);
      if (arrived && vehicle->hold_ticks > 0) --vehicle->hold_ticks;
      if (!arrived || vehicle->hold_ticks > 0) all_done = false;
    }
    if (!all_done) continue;

    tactic.lifecycle = TacticLifecycle::Completed;
    ++summary_.tactics_completed;
    Event event = base_event(EventType::TacticCompleted);
    event.tactic_id = tactic.id;
    event.tactic_kind = tactic.spec.kind;
    event.origin = tactic.origin;
    push(event);

    for (const int id : tactic.assigned) {
      auto* vehicle = find_vehicle(id);
      if (vehicle == nullptr || vehicle->neutralized()) continue;
      vehicle->tactic_id = -1;
      vehicle->hold_ticks = 0;
      if (tactic.spec.kind == TacticKind::Rtl) continue;
      if (vehicle->kind == VehicleKind::Uav) {
        send_home(*vehicle);  // UAVs return automatically after their tactic
      } else {
        vehicle->status = VehicleStatus::Idle;  // UGVs wait in place
        vehicle->path.clear();
        vehicle->path_index = 0;
        if (tactic.spec.kind == TacticKind::Explore) {
          // step back outside so the vehicle regains comms and taskability
          if (const auto exit_cell = egress_cell(vehicle->pos)) {
            route_vehicle(*vehicle, *exit_cell);
          }
        }
      }
    }
    tactic.assigned.clear();
    tactic.assigned_slots.clear();
  }
}

void Simulation::emit_telemetry() {
  if (tick_ % script_.telemetry_period_s != 0) return;
  for (const auto& vehicle : vehicles_) {
    if (!vehicle.connected) continue;  // silent vehicles are simply not logged
    Event event = base_event(EventType::Telemetry);
    event.vehicle = ref(vehicle);
    event.status = vehicle.blocked_flag && vehicle.status == VehicleStatus::Tasked
                       ? VehicleStatus::Blocked
                       : vehicle.status;
    event.pos = vehicle.pos;
    event.band = vehicle.band;
    event.battery = vehicle.battery;
    push(event);
  }
}

void Simulation::record_demand() {
  const Timestamp cutoff = now() - 60'000;
  while (!recent_issued_.empty() && recent_issued_.front() <= cutoff) {
    recent_issued_.pop_front();
  }
  while (!recent_neutralized_.empty() && recent_neutralized_.front() <= cutoff) {
    recent_neutralized_.pop_front();
  }
  bool authoring = false;
  for (const auto& window : authoring_windows_) {
    if (window.first <= now() && now() < window.second) {
      authoring = true;
      break;
    }
  }
  std::size_t blocked_now = 0;
  for (const auto& vehicle : vehicles_) {
    if (vehicle.inst == Instantiation::Hardware && vehicle.blocked_flag &&
        !vehicle.neutralized()) {
      ++blocked_now;
    }
  }
  const auto& weights = script_.demand;
  const double raw = weights.authoring * (authoring ? 1.0 : 0.0) +
                     weights.issued_60s * static_cast<double>(recent_issued_.size()) +
                     weights.blocked * static_cast<double>(blocked_now) +
                     weights.neutralized_60s *
                         static_cast<double>(recent_neutralized_.size());
  demand_.demand.push_back(std::clamp(raw / weights.cap, 0.0, 1.0));
}

void Simulation::step() {
  process_actions();
  move_vehicles();
  update_batteries();
  update_comms();  // link state reflects the positions vehicles moved into
  update_artifacts();
  update_tactics();
  check_plan_progress();
  emit_telemetry();
  record_demand();
  ++tick_;
}

void Simulation::run() {
  const std::int64_t total_ticks = script_.duration / 1000;
  while (tick_ <= total_ticks) step();
}

std::vector<std::vector<int>> Simulation::plan_node_tactics() const {
  std::vector<std::vector<int>> out;
  out.reserve(nodes_.size());
  for (const auto& node : nodes_) out.push_back(node.tactic_ids);
  return out;
}

ScenarioResult run_scenario(const ScenarioScript& script) {
  Simulation sim(script);
  sim.run();
  return {sim.events(), sim.demand(), sim.summary()};
}

}  // namespace swarmload::sim
