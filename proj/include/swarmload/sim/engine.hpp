// Deterministic discrete-event swarm simulation, 1 Hz ticks. A scripted
// commander drives dispatcher allocation, gated mission plans, tactic
// lifecycles, neutralization and revival, batteries with UAV swaps,
// blockage/nudge handling, and a lossy telemetry model; every run emits the
// typed event log plus the commander task-demand trace.
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmload/sim/events.hpp"
#include "swarmload/sim/model.hpp"

namespace swarmload::sim {

struct AllocationResult {
  bool ok = false;
  std::vector<int> vehicles;     ///< chosen ids, slot by slot
  std::vector<int> slot_of;      ///< parallel: requirement slot each id fills
  std::string failure;
};

struct ScenarioSummary {
  std::size_t tactics_issued = 0;
  std::size_t tactics_completed = 0;
  std::size_t tactics_failed = 0;
  std::size_t vehicles_neutralized = 0;
  std::size_t artifacts_neutralized = 0;
  std::size_t blockage_events = 0;
  std::size_t swap_requests = 0;
};

struct ScenarioResult {
  EventLog events;
  DemandTrace demand;
  ScenarioSummary summary;
};

class Simulation {
 public:
  explicit Simulation(ScenarioScript script);

  /// Execute the whole scripted shift.
  void run();

  /// Advance one second: scripted actions due now, vehicle movement and
  /// conflicts, batteries, comm state, artifact interactions, tactic
  /// progress, telemetry, and the demand sample.
  void step();

  // Dispatcher / commander surface (also exercised directly by tests).

  /// Select vehicles for a request: connected, non-neutralized, idle
  /// candidates meeting each slot's capability constraints, nearest to the
  /// goal first (ties by lower id). Explicit vehicle lists skip selection
  /// but are still validated.
  AllocationResult allocate(const TacticSpec& spec) const;

  /// Create a tactic, run allocation, and issue it (or fail it).
  /// Returns the tactic id.
  int create_and_issue_tactic(const TacticSpec& spec, TacticOrigin origin);

  /// Instantiate the mission plan; nodes with no gate start immediately.
  void load_plan();

  /// Fire a mission-plan signal, activating every node gated by it whose
  /// predecessors are complete. Unknown names throw; refiring is a warning
  /// no-op.
  void issue_signal(const std::string& name);

  /// Displace a stuck vehicle: UAVs climb one altitude band, UGVs shift one
  /// configured offset; a replan follows. Rejected for neutralized vehicles,
  /// warning no-op for idle ones.
  void nudge(int vehicle_id);

  void stop_vehicle(int vehicle_id);
  void rtl_vehicle(int vehicle_id);

  /// Mobile-medic sweep: revives neutralized vehicles inside the launch zone
  /// and swaps their batteries.
  void deploy_medic();

  Timestamp now() const { return tick_ * 1000; }
  const EventLog& events() const { return events_; }
  const DemandTrace& demand() const { return demand_; }
  const ScenarioSummary& summary() const { return summary_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<Tactic>& tactics() const { return tactics_; }
  const std::vector<Artifact>& artifacts() const { return artifacts_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool medic_detected() const { return medic_detected_; }
  /// Tactic ids created per mission-plan node, index-aligned with the
  /// script's node list; empty for nodes that never activated.
  std::vector<std::vector<int>> plan_node_tactics() const;

 private:
  struct NodeState {
    bool activated = false;
    bool completed = false;
    std::vector<int> tactic_ids;
  };

  Vehicle* find_vehicle(int id);
  const Vehicle* find_vehicle(int id) const;
  Tactic* find_tactic(int id);

  GridPos tactic_goal(const TacticSpec& spec) const;
  std::optional<GridPos> egress_cell(GridPos inside) const;
  std::vector<GridPos> assignment_posts(const TacticSpec& spec, std::size_t n) const;
  bool cell_walkable(GridPos cell, AltitudeBand band, const Building* target) const;
  std::vector<GridPos> plan_path(const Vehicle& vehicle, GridPos goal,
                                 const std::vector<GridPos>& avoid) const;
  void route_vehicle(Vehicle& vehicle, GridPos goal);
  void send_home(Vehicle& vehicle);

  void process_actions();
  void move_vehicles();
  void update_batteries();
  void update_artifacts();
  void update_comms();
  void emit_telemetry();
  void update_tactics();
  void check_plan_progress();
  void activate_node(std::size_t index);
  bool node_ready(std::size_t index) const;

  void remove_from_tactic(Vehicle& vehicle, bool may_fail_tactic);
  void neutralize_vehicle(Vehicle& vehicle);
  void request_swap(Vehicle& vehicle);
  void record_demand();

  Event base_event(EventType type) const;
  VehicleRef ref(const Vehicle& vehicle) const;
  void push(Event event);
  void warn(std::string message);

  ScenarioScript script_;
  std::vector<Vehicle> vehicles_;
  std::vector<Tactic> tactics_;
  std::vector<Artifact> artifacts_;
  std::vector<NodeState> nodes_;
  std::map<std::string, bool> signals_fired_;
  bool plan_loaded_ = false;
  bool medic_detected_ = false;
  GridPos medic_pos_{};

  EventLog events_;
  DemandTrace demand_;
  ScenarioSummary summary_;
  std::vector<std::string> warnings_;

  std::int64_t tick_ = 0;
  int next_tactic_id_ = 1;
  std::size_t action_index_ = 0;
  std::vector<std::pair<Timestamp, TacticSpec>> pending_authored_;
  std::deque<Timestamp> recent_issued_;
  std::deque<Timestamp> recent_neutralized_;
  std::vector<std::pair<Timestamp, Timestamp>> authoring_windows_;

  // per-band occupancy of hardware vehicles, stamped per tick
  std::vector<std::int32_t> occupant_grid_;
  std::vector<std::int32_t> occupant_stamp_;
};

/// Run a parsed scenario start to finish; identical scripts and seeds give
/// byte-identical logs.
ScenarioResult run_scenario(const ScenarioScript& script);

}  // namespace swarmload::sim
