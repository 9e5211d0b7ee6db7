#include "scenario_fixtures.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "swarmload/rng.hpp"

namespace swarmload::testsupport {

using namespace sim;

ScenarioScript empty_scenario(int width, int height, Timestamp duration_ms) {
  ScenarioScript script;
  script.seed = 0;
  script.duration = duration_ms;
  script.telemetry_period_s = 1;
  script.map.width = width;
  script.map.height = height;
  script.map.launch_zone = {1, 1, std::min(20, width - 2), std::min(10, height - 2)};
  return script;
}

ScenarioScript random_scenario(std::uint64_t seed, int fleet_size, int duration_s) {
  Rng rng(seed);
  ScenarioScript script = empty_scenario(64, 48, static_cast<Timestamp>(duration_s) * 1000);
  script.seed = seed;
  script.telemetry_period_s = 5;
  script.comm.dropout_per_tick = rng.uniform_in(0.0005, 0.004);

  // a few buildings in the upper half, clear of the launch zone
  const int building_count = static_cast<int>(rng.uniform_int(3, 6));
  for (int b = 0; b < building_count; ++b) {
    Building building;
    building.id = b + 1;
    const int w = static_cast<int>(rng.uniform_int(4, 8));
    const int h = static_cast<int>(rng.uniform_int(4, 8));
    const int x0 = static_cast<int>(rng.uniform_int(24, 62 - w));
    const int y0 = static_cast<int>(rng.uniform_int(14, 46 - h));
    building.bounds = {x0, y0, x0 + w, y0 + h};
    building.door = {x0, y0 + h / 2};
    const bool overlaps =
        std::any_of(script.map.buildings.begin(), script.map.buildings.end(),
                    [&](const Building& other) {
                      return !(building.bounds.x1 + 1 < other.bounds.x0 ||
                               other.bounds.x1 + 1 < building.bounds.x0 ||
                               building.bounds.y1 + 1 < other.bounds.y0 ||
                               other.bounds.y1 + 1 < building.bounds.y0);
                    });
    if (!overlaps) script.map.buildings.push_back(building);
  }

  // fleet: hardware/virtual UGVs and UAVs with cycled capabilities
  const auto cameras = {CameraFit::Forward, CameraFit::Downward, CameraFit::Both};
  const auto payloads = {PayloadKind::Electronic, PayloadKind::AntiPersonnel,
                         PayloadKind::None};
  for (int i = 0; i < fleet_size; ++i) {
    Vehicle vehicle;
    vehicle.id = i + 1;
    const int bucket = i % 10;
    vehicle.kind = bucket < 3 ? VehicleKind::Ugv : VehicleKind::Uav;
    vehicle.inst = bucket % 10 < 7 ? Instantiation::Hardware : Instantiation::Virtual;
    vehicle.camera = *(cameras.begin() + static_cast<std::size_t>(i) % cameras.size());
    vehicle.payload = *(payloads.begin() + static_cast<std::size_t>(i) % payloads.size());
    vehicle.endurance_s = static_cast<int>(rng.uniform_int(600, 1'200));
    const auto& zone = script.map.launch_zone;
    const int zone_w = zone.x1 - zone.x0 + 1;
    vehicle.pos = {zone.x0 + i % zone_w, zone.y0 + (i / zone_w) % (zone.y1 - zone.y0 + 1)};
    script.fleet.push_back(vehicle);
  }

  // artifacts: hostiles and explosives near buildings, intel, one medic
  int artifact_id = 1;
  const int hostile_count = static_cast<int>(rng.uniform_int(3, 7));
  for (int a = 0; a < hostile_count; ++a) {
    Artifact artifact;
    artifact.id = artifact_id++;
    artifact.type = rng.uniform() < 0.5 ? ArtifactType::Hostile : ArtifactType::Explosive;
    artifact.active = true;
    artifact.threat_radius = static_cast<int>(rng.uniform_int(1, 2));
    artifact.pos = {static_cast<int>(rng.uniform_int(22, 62)),
                    static_cast<int>(rng.uniform_int(12, 46))};
    if (script.map.building_at(artifact.pos) != nullptr) {
      artifact.pos = {artifact.pos.x, 12};
    }
    artifact.required_payloads = rng.uniform() < 0.5
                                     ? std::vector<PayloadKind>{PayloadKind::Electronic}
                                     : std::vector<PayloadKind>{PayloadKind::Electronic,
                                                                PayloadKind::AntiPersonnel};
    script.artifacts.push_back(artifact);
  }
  {
    Artifact medic;
    medic.id = artifact_id++;
    medic.type = ArtifactType::MedicMarker;
    medic.active = false;
    medic.threat_radius = 0;
    medic.pos = {static_cast<int>(rng.uniform_int(4, 18)), 12};
    script.artifacts.push_back(medic);
  }

  // mission plan: start wave, two signal-gated waves, one follow-on node
  script.plan.signals = {"west", "east"};
  const auto surveil_node = [&](int id, int building_id,
                                std::optional<std::string> gate) {
    PlanNode node;
    node.id = id;
    node.gate_signal = std::move(gate);
    TacticSpec spec;
    spec.kind = TacticKind::Surveil;
    spec.target.building_id = building_id;
    spec.requirements = {{VehicleKind::Uav, CameraFit::Forward, std::nullopt, 2},
                         {VehicleKind::Uav, CameraFit::Downward, std::nullopt, 1}};
    node.tactics.push_back(spec);
    return node;
  };
  const int buildings_available = static_cast<int>(script.map.buildings.size());
  script.plan.nodes.push_back(surveil_node(1, 1 + 0 % buildings_available, std::nullopt));
  script.plan.nodes.push_back(
      surveil_node(2, 1 + 1 % buildings_available, std::string("west")));
  script.plan.nodes.push_back(
      surveil_node(3, 1 + 2 % buildings_available, std::string("east")));
  {
    PlanNode follow;
    follow.id = 4;
    follow.predecessors = {1};
    TacticSpec spec;
    spec.kind = TacticKind::Goto;
    spec.target.point = GridPos{static_cast<int>(rng.uniform_int(24, 60)),
                                static_cast<int>(rng.uniform_int(14, 44))};
    spec.requirements = {{VehicleKind::Ugv, std::nullopt, PayloadKind::Electronic, 2}};
    follow.tactics.push_back(spec);
    script.plan.nodes.push_back(follow);
  }

  // commander timeline
  script.actions.push_back({0, ActionType::LoadPlan, "", std::nullopt, 0, -1});
  Timestamp t = static_cast<Timestamp>(rng.uniform_int(60, 240)) * 1000;
  script.actions.push_back({t, ActionType::Signal, "west", std::nullopt, 0, -1});
  t += static_cast<Timestamp>(rng.uniform_int(30, 180)) * 1000;
  script.actions.push_back({t, ActionType::Signal, "east", std::nullopt, 0, -1});

  const int authored = static_cast<int>(rng.uniform_int(3, 8));
  for (int i = 0; i < authored; ++i) {
    t += static_cast<Timestamp>(rng.uniform_int(30, 150)) * 1000;
    if (t >= script.duration - 60'000) break;
    TacticSpec spec;
    if (rng.uniform() < 0.5) {
      spec.kind = TacticKind::Goto;
      spec.target.point = GridPos{static_cast<int>(rng.uniform_int(22, 60)),
                                  static_cast<int>(rng.uniform_int(12, 44))};
      spec.requirements = {{VehicleKind::Uav, std::nullopt, std::nullopt,
                            static_cast<int>(rng.uniform_int(2, 6))}};
    } else {
      spec.kind = TacticKind::Surveil;
      spec.target.building_id =
          1 + static_cast<int>(rng.uniform_int(0, buildings_available - 1));
      spec.requirements = {{VehicleKind::Uav, CameraFit::Forward, std::nullopt,
                            static_cast<int>(rng.uniform_int(1, 3))}};
    }
    CommanderAction action;
    action.t = t;
    action.type = ActionType::AuthorTactic;
    action.tactic = spec;
    action.authoring_duration = rng.uniform_int(15, 60) * 1000;
    script.actions.push_back(action);
  }
  {
    CommanderAction medic;
    medic.t = std::min<Timestamp>(script.duration - 10'000,
                                  t + rng.uniform_int(60, 240) * 1000);
    medic.type = ActionType::DeployMedic;
    script.actions.push_back(medic);
  }
  std::sort(script.actions.begin(), script.actions.end(),
            [](const CommanderAction& a, const CommanderAction& b) { return a.t < b.t; });
  return script;
}

namespace {

bool slot_accepts(const RequirementSlot& slot, const Vehicle& vehicle) {
  if (slot.kind && vehicle.kind != *slot.kind) return false;
  if (slot.camera && !vehicle.has_camera(*slot.camera)) return false;
  if (slot.payload && vehicle.payload != *slot.payload) return false;
  return true;
}

}  // namespace

InvariantReport check_invariants(const sim::Simulation& sim,
                                 const sim::ScenarioScript& script) {
  InvariantReport report;
  std::map<int, const Vehicle*> roster;
  for (const auto& vehicle : script.fleet) roster[vehicle.id] = &vehicle;
  std::map<int, const Tactic*> tactic_by_id;
  for (const auto& tactic : sim.tactics()) tactic_by_id[tactic.id] = &tactic;

  // signal times and the set of tactics owned by gated plan nodes
  std::map<std::string, Timestamp> signal_time;
  for (const auto& event : sim.events()) {
    if (event.type == EventType::Signal) {
      signal_time.emplace(event.detail, event.t);
    }
  }
  const auto& node_tactics = sim.plan_node_tactics();

  std::map<int, bool> neutralized_now;
  std::map<int, bool> connected_now;
  for (const auto& [id, vehicle] : roster) {
    neutralized_now[id] = false;
    connected_now[id] = true;
  }

  for (const auto& event : sim.events()) {
    switch (event.type) {
      case EventType::TacticIssued: {
        // capability check: every requirement slot of the spec must be
        // satisfiable by the assigned set, greedily in slot order
        const auto it = tactic_by_id.find(event.tactic_id);
        if (it == tactic_by_id.end()) {
          report.details.push_back("issued tactic without record: " +
                                   std::to_string(event.tactic_id));
          ++report.capability_violations;
          break;
        }
        const auto& slots = it->second->spec.requirements;
        std::vector<const Vehicle*> assigned;
        for (const auto& ref : event.assigned) {
          const auto vehicle_it = roster.find(ref.id);
          if (vehicle_it == roster.end()) {
            ++report.capability_violations;
            report.details.push_back("assigned unknown vehicle");
            continue;
          }
          assigned.push_back(vehicle_it->second);
          if (neutralized_now[ref.id]) {
            ++report.post_neutralization_progress;
            report.details.push_back("tactic " + std::to_string(event.tactic_id) +
                                     " issued to neutralized vehicle " +
                                     std::to_string(ref.id));
          }
        }
        std::vector<bool> used(assigned.size(), false);
        for (const auto& slot : slots) {
          int need = slot.count;
          for (std::size_t i = 0; i < assigned.size() && need > 0; ++i) {
            if (used[i] || !slot_accepts(slot, *assigned[i])) continue;
            used[i] = true;
            --need;
          }
          if (need > 0) {
            ++report.capability_violations;
            report.details.push_back("tactic " + std::to_string(event.tactic_id) +
                                     " violates a requirement slot");
          }
        }
        break;
      }
      case EventType::Neutralized:
        neutralized_now[event.vehicle.id] = true;
        break;
      case EventType::Revived:
        neutralized_now[event.vehicle.id] = false;
        break;
      case EventType::CommLoss:
        connected_now[event.vehicle.id] = false;
        break;
      case EventType::CommRestore:
        connected_now[event.vehicle.id] = true;
        break;
      case EventType::Telemetry:
        if (!connected_now[event.vehicle.id]) {
          ++report.telemetry_while_disconnected;
        }
        if (neutralized_now[event.vehicle.id] &&
            (event.status == VehicleStatus::Tasked ||
             event.status == VehicleStatus::Blocked)) {
          ++report.post_neutralization_progress;
          report.details.push_back("neutralized vehicle " +
                                   std::to_string(event.vehicle.id) +
                                   " reported tactic progress");
        }
        break;
      case EventType::SwapCompleted:
        if (neutralized_now[event.vehicle.id]) {
          ++report.post_neutralization_progress;
        }
        break;
      default:
        break;
    }
  }

  // gated plan tactics must be issued strictly after their gate fired
  std::map<int, Timestamp> issue_time;
  for (const auto& event : sim.events()) {
    if (event.type == EventType::TacticIssued) {
      issue_time.emplace(event.tactic_id, event.t);
    }
  }
  for (std::size_t node_index = 0; node_index < script.plan.nodes.size(); ++node_index) {
    const auto& node = script.plan.nodes[node_index];
    if (!node.gate_signal) continue;
    const auto signal_it = signal_time.find(*node.gate_signal);
    for (const int tactic_id : node_tactics[node_index]) {
      const auto issued_it = issue_time.find(tactic_id);
      if (issued_it == issue_time.end()) continue;
      if (signal_it == signal_time.end() || issued_it->second < signal_it->second) {
        ++report.pre_signal_issues;
        report.details.push_back("gated tactic " + std::to_string(tactic_id) +
                                 " issued before signal '" + *node.gate_signal + "'");
      }
    }
  }
  return report;
}

}  // namespace swarmload::testsupport
