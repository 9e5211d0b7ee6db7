// Simulator domain model: the world grid, vehicles, tactics, gated mission
// plans, scenario artifacts, and the scripted commander timeline.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmload/types.hpp"

namespace swarmload::sim {

enum class VehicleKind : std::uint8_t { Ugv, Uav };
enum class Instantiation : std::uint8_t { Hardware, Virtual };
enum class CameraFit : std::uint8_t { Forward, Downward, Both, None };
enum class PayloadKind : std::uint8_t { Electronic, AntiPersonnel, None };
enum class AltitudeBand : std::uint8_t { Ground, BuiltEnv, Enroute };
enum class VehicleStatus : std::uint8_t {
  Idle,
  Tasked,
  Blocked,
  Neutralized,
  ReturningToLaunch,
  AtMedic,
  Charging,
};

std::string_view to_string(VehicleKind kind);
std::string_view to_string(Instantiation inst);
std::string_view to_string(CameraFit camera);
std::string_view to_string(PayloadKind payload);
std::string_view to_string(AltitudeBand band);
std::string_view to_string(VehicleStatus status);

std::optional<VehicleKind> vehicle_kind_from_string(std::string_view name);
std::optional<Instantiation> instantiation_from_string(std::string_view name);
std::optional<CameraFit> camera_from_string(std::string_view name);
std::optional<PayloadKind> payload_from_string(std::string_view name);
std::optional<VehicleStatus> vehicle_status_from_string(std::string_view name);

struct GridPos {
  int x = 0;
  int y = 0;
  bool operator==(const GridPos&) const = default;
};

/// Chebyshev cell distance; diagonal-adjacent cells are one step apart.
inline int grid_distance(GridPos a, GridPos b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounds
  bool contains(GridPos p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  GridPos center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
};

struct Building {
  int id = 0;
  Rect bounds;
  GridPos door;  ///< ground ingress cell on the perimeter
};

struct WorldMap {
  int width = 0;
  int height = 0;
  Rect launch_zone;
  std::vector<Building> buildings;

  bool in_bounds(GridPos p) const {
    return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
  }
  const Building* building(int id) const;
  const Building* building_at(GridPos p) const;
};

struct Vehicle {
  int id = 0;
  VehicleKind kind = VehicleKind::Ugv;
  Instantiation inst = Instantiation::Hardware;
  CameraFit camera = CameraFit::Forward;
  PayloadKind payload = PayloadKind::None;
  double battery = 1.0;
  int endurance_s = 900;  ///< airborne seconds on a full charge (UAV)
  GridPos pos;
  AltitudeBand band = AltitudeBand::Ground;
  VehicleStatus status = VehicleStatus::Idle;
  bool connected = true;

  // runtime navigation / bookkeeping
  std::vector<GridPos> path;       ///< remaining cells, front is next
  std::size_t path_index = 0;
  int tactic_id = -1;
  int blocked_ticks = 0;
  bool blocked_flag = false;       ///< reported as Blocked while set
  int dwell_ticks = 0;             ///< consecutive ticks inside a threat radius
  int hold_ticks = 0;              ///< remaining dwell at a tactic post
  int charge_ticks = 0;
  int revive_ticks = 0;
  bool swap_requested = false;
  bool route_to_medic = false;
  GridPos goal;

  bool neutralized() const { return status == VehicleStatus::Neutralized ||
                                    status == VehicleStatus::AtMedic; }
  bool has_camera(CameraFit want) const {
    if (want == CameraFit::None) return true;
    return camera == want || camera == CameraFit::Both;
  }
};

enum class TacticKind : std::uint8_t { Surveil, Goto, Explore, Cordon, Nudge, Stop, Rtl };
enum class TacticOrigin : std::uint8_t { Plan, Commander };
enum class TacticLifecycle : std::uint8_t {
  Created,
  Issued,
  Executing,
  Completed,
  Failed,
  Cancelled,
};

std::string_view to_string(TacticKind kind);
std::string_view to_string(TacticOrigin origin);
std::string_view to_string(TacticLifecycle lifecycle);
std::optional<TacticKind> tactic_kind_from_string(std::string_view name);
std::optional<TacticOrigin> tactic_origin_from_string(std::string_view name);

/// One capability slot of a tactic request: `count` vehicles matching every
/// listed constraint.
struct RequirementSlot {
  std::optional<VehicleKind> kind;
  std::optional<CameraFit> camera;
  std::optional<PayloadKind> payload;
  int count = 1;
};

struct TargetGeometry {
  std::optional<int> building_id;
  std::optional<GridPos> point;
  std::vector<GridPos> polygon;
};

struct TacticSpec {
  TacticKind kind = TacticKind::Goto;
  TargetGeometry target;
  std::vector<RequirementSlot> requirements;
  std::vector<int> explicit_vehicles;  ///< bypasses selection, not validation
};

struct Tactic {
  int id = 0;
  TacticSpec spec;
  TacticOrigin origin = TacticOrigin::Commander;
  TacticLifecycle lifecycle = TacticLifecycle::Created;
  std::vector<int> assigned;
  std::vector<int> assigned_slots;  ///< requirement slot each vehicle fills

  bool terminal() const {
    return lifecycle == TacticLifecycle::Completed ||
           lifecycle == TacticLifecycle::Failed ||
           lifecycle == TacticLifecycle::Cancelled;
  }
};

/// Mission-plan node: tactics released at mission start, on a gating signal,
/// and/or after every predecessor node has completed.
struct PlanNode {
  int id = 0;
  std::optional<std::string> gate_signal;
  std::vector<int> predecessors;
  std::vector<TacticSpec> tactics;
};

struct MissionPlan {
  std::vector<PlanNode> nodes;
  std::vector<std::string> signals;  ///< declared signal vocabulary
};

enum class ArtifactType : std::uint8_t {
  Intel,
  Hostile,
  Explosive,
  HighValueTarget,
  MedicMarker,
};
enum class ArtifactState : std::uint8_t { Hidden, Detected, Neutralized };

std::string_view to_string(ArtifactType type);
std::string_view to_string(ArtifactState state);
std::optional<ArtifactType> artifact_type_from_string(std::string_view name);

struct Artifact {
  int id = 0;
  ArtifactType type = ArtifactType::Intel;
  GridPos pos;
  bool active = false;  ///< only active artifacts can neutralize vehicles
  int threat_radius = 0;
  std::vector<PayloadKind> required_payloads;  ///< simultaneous multiset
  ArtifactState state = ArtifactState::Hidden;
};

enum class ActionType : std::uint8_t {
  LoadPlan,
  Signal,
  AuthorTactic,
  IssueTactic,
  Nudge,
  Stop,
  Rtl,
  DeployMedic,  ///< mobile medic sweep of the launch zone
};

std::string_view to_string(ActionType type);

struct CommanderAction {
  Timestamp t = 0;
  ActionType type = ActionType::LoadPlan;
  std::string signal_name;
  std::optional<TacticSpec> tactic;
  Timestamp authoring_duration = 0;
  int vehicle_id = -1;
};

struct CommZone {
  Rect bounds;
  double dropout_per_tick = 0.0;
};

struct CommModel {
  double dropout_per_tick = 0.0;  ///< baseline Bernoulli loss probability
  std::vector<CommZone> zones;    ///< overrides inside their bounds
};

/// Commander task-demand weights; the raw sum is divided by `cap` and
/// clipped to [0, 1].
struct DemandWeights {
  double authoring = 3.0;
  double issued_60s = 1.0;
  double blocked = 0.5;
  double neutralized_60s = 1.0;
  double cap = 12.0;
};

struct SimTuning {
  int block_threshold_ticks = 3;   ///< conflict ticks before a Blocked event
  int dwell_neutralize_ticks = 3;  ///< threat-radius dwell before neutralization
  int revive_delay_s = 10;
  int battery_swap_s = 60;
  int detect_radius = 3;
  int surveil_hold_s = 20;
  int cordon_hold_s = 60;
  double swap_battery_fraction = 0.20;  ///< auto-RTL + swap request threshold
};

struct ScenarioScript {
  std::uint64_t seed = 0;
  Timestamp duration = 0;
  int telemetry_period_s = 1;
  WorldMap map;
  std::vector<Vehicle> fleet;
  std::vector<Artifact> artifacts;
  MissionPlan plan;
  std::vector<CommanderAction> actions;
  CommModel comm;
  DemandWeights demand;
  SimTuning tuning;
};

/// Parse and validate a scenario document; problems are reported before tick
/// zero as Error(ScenarioInvalid).
ScenarioScript parse_scenario(const std::string& json_text);
ScenarioScript parse_scenario_file(const std::string& path);

}  // namespace swarmload::sim
