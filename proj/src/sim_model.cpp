#include "swarmload/sim/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swarmload/errors.hpp"

namespace swarmload::sim {

using nlohmann::ordered_json;

std::string_view to_string(VehicleKind kind) {
  return kind == VehicleKind::Ugv ? "ugv" : "uav";
}
std::string_view to_string(Instantiation inst) {
  return inst == Instantiation::Hardware ? "hardware" : "virtual";
}
std::string_view to_string(CameraFit camera) {
  switch (camera) {
    case CameraFit::Forward: return "forward";
    case CameraFit::Downward: return "downward";
    case CameraFit::Both: return "both";
    case CameraFit::None: return "none";
  }
  return "?";
}
std::string_view to_string(PayloadKind payload) {
  switch (payload) {
    case PayloadKind::Electronic: return "electronic";
    case PayloadKind::AntiPersonnel: return "anti_personnel";
    case PayloadKind::None: return "none";
  }
  return "?";
}
std::string_view to_string(AltitudeBand band) {
  switch (band) {
    case AltitudeBand::Ground: return "ground";
    case AltitudeBand::BuiltEnv: return "built_env";
    case AltitudeBand::Enroute: return "enroute";
  }
  return "?";
}
std::string_view to_string(VehicleStatus status) {
  switch (status) {
    case VehicleStatus::Idle: return "idle";
    case VehicleStatus::Tasked: return "tasked";
    case VehicleStatus::Blocked: return "blocked";
    case VehicleStatus::Neutralized: return "neutralized";
    case VehicleStatus::ReturningToLaunch: return "rtl";
    case VehicleStatus::AtMedic: return "at_medic";
    case VehicleStatus::Charging: return "charging";
  }
  return "?";
}
std::string_view to_string(TacticKind kind) {
  switch (kind) {
    case TacticKind::Surveil: return "surveil";
    case TacticKind::Goto: return "goto";
    case TacticKind::Explore: return "explore";
    case TacticKind::Cordon: return "cordon";
    case TacticKind::Nudge: return "nudge";
    case TacticKind::Stop: return "stop";
    case TacticKind::Rtl: return "rtl";
  }
  return "?";
}
std::string_view to_string(TacticOrigin origin) {
  return origin == TacticOrigin::Plan ? "plan" : "commander";
}
std::string_view to_string(TacticLifecycle lifecycle) {
  switch (lifecycle) {
    case TacticLifecycle::Created: return "created";
    case TacticLifecycle::Issued: return "issued";
    case TacticLifecycle::Executing: return "executing";
    case TacticLifecycle::Completed: return "completed";
    case TacticLifecycle::Failed: return "failed";
    case TacticLifecycle::Cancelled: return "cancelled";
  }
  return "?";
}
std::string_view to_string(ArtifactType type) {
  switch (type) {
    case ArtifactType::Intel: return "intel";
    case ArtifactType::Hostile: return "hostile";
    case ArtifactType::Explosive: return "explosive";
    case ArtifactType::HighValueTarget: return "high_value_target";
    case ArtifactType::MedicMarker: return "medic_marker";
  }
  return "?";
}
std::string_view to_string(ArtifactState state) {
  switch (state) {
    case ArtifactState::Hidden: return "hidden";
    case ArtifactState::Detected: return "detected";
    case ArtifactState::Neutralized: return "neutralized";
  }
  return "?";
}
std::string_view to_string(ActionType type) {
  switch (type) {
    case ActionType::LoadPlan: return "load_plan";
    case ActionType::Signal: return "signal";
    case ActionType::AuthorTactic: return "author_tactic";
    case ActionType::IssueTactic: return "issue_tactic";
    case ActionType::Nudge: return "nudge";
    case ActionType::Stop: return "stop";
    case ActionType::Rtl: return "rtl";
    case ActionType::DeployMedic: return "deploy_medic";
  }
  return "?";
}

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view name, const std::array<Enum, N>& values) {
  for (const auto value : values) {
    if (to_string(value) == name) return value;
  }
  return std::nullopt;
}

}  // namespace

std::optional<VehicleKind> vehicle_kind_from_string(std::string_view name) {
  return lookup(name, std::array{VehicleKind::Ugv, VehicleKind::Uav});
}
std::optional<Instantiation> instantiation_from_string(std::string_view name) {
  return lookup(name, std::array{Instantiation::Hardware, Instantiation::Virtual});
}
std::optional<CameraFit> camera_from_string(std::string_view name) {
  return lookup(name, std::array{CameraFit::Forward, CameraFit::Downward,
                                 CameraFit::Both, CameraFit::None});
}
std::optional<PayloadKind> payload_from_string(std::string_view name) {
  return lookup(name, std::array{PayloadKind::Electronic, PayloadKind::AntiPersonnel,
                                 PayloadKind::None});
}
std::optional<VehicleStatus> vehicle_status_from_string(std::string_view name) {
  return lookup(name, std::array{VehicleStatus::Idle, VehicleStatus::Tasked,
                                 VehicleStatus::Blocked, VehicleStatus::Neutralized,
                                 VehicleStatus::ReturningToLaunch, VehicleStatus::AtMedic,
                                 VehicleStatus::Charging});
}
std::optional<TacticKind> tactic_kind_from_string(std::string_view name) {
  return lookup(name, std::array{TacticKind::Surveil, TacticKind::Goto, TacticKind::Explore,
                                 TacticKind::Cordon, TacticKind::Nudge, TacticKind::Stop,
                                 TacticKind::Rtl});
}
std::optional<TacticOrigin> tactic_origin_from_string(std::string_view name) {
  return lookup(name, std::array{TacticOrigin::Plan, TacticOrigin::Commander});
}
std::optional<ArtifactType> artifact_type_from_string(std::string_view name) {
  return lookup(name, std::array{ArtifactType::Intel, ArtifactType::Hostile,
                                 ArtifactType::Explosive, ArtifactType::HighValueTarget,
                                 ArtifactType::MedicMarker});
}

const Building* WorldMap::building(int id) const {
  for (const auto& b : buildings) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const Building* WorldMap::building_at(GridPos p) const {
  for (const auto& b : buildings) {
    if (b.bounds.contains(p)) return &b;
  }
  return nullptr;
}

namespace {

[[noreturn]] void bad_scenario(const std::string& message) {
  throw Error(Errc::ScenarioInvalid, "scenario: " + message);
}

GridPos parse_pos(const ordered_json& doc) {
  return {doc.at("x").get<int>(), doc.at("y").get<int>()};
}

Rect parse_rect(const ordered_json& doc) {
  Rect rect{doc.at("x0").get<int>(), doc.at("y0").get<int>(), doc.at("x1").get<int>(),
            doc.at("y1").get<int>()};
  if (rect.x1 < rect.x0 || rect.y1 < rect.y0) bad_scenario("rect with negative extent");
  return rect;
}

TacticSpec parse_tactic_spec(const ordered_json& doc) {
  TacticSpec spec;
  const std::string kind = doc.at("kind").get<std::string>();
  const auto parsed = tactic_kind_from_string(kind);
  if (!parsed) bad_scenario("unknown tactic kind '" + kind + "'");
  spec.kind = *parsed;
  if (doc.contains("building")) spec.target.building_id = doc.at("building").get<int>();
  if (doc.contains("point")) spec.target.point = parse_pos(doc.at("point"));
  if (doc.contains("polygon")) {
    for (const auto& vertex : doc.at("polygon")) {
      spec.target.polygon.push_back({vertex.at(0).get<int>(), vertex.at(1).get<int>()});
    }
  }
  if (doc.contains("require")) {
    for (const auto& entry : doc.at("require")) {
      RequirementSlot slot;
      if (entry.contains("kind")) {
        const auto k = vehicle_kind_from_string(entry.at("kind").get<std::string>());
        if (!k) bad_scenario("bad requirement kind");
        slot.kind = *k;
      }
      if (entry.contains("camera")) {
        const auto c = camera_from_string(entry.at("camera").get<std::string>());
        if (!c) bad_scenario("bad requirement camera");
        slot.camera = *c;
      }
      if (entry.contains("payload")) {
        const auto p = payload_from_string(entry.at("payload").get<std::string>());
        if (!p) bad_scenario("bad requirement payload");
        slot.payload = *p;
      }
      slot.count = entry.value("count", 1);
      if (slot.count < 1) bad_scenario("requirement count must be >= 1");
      spec.requirements.push_back(slot);
    }
  }
  if (doc.contains("vehicles")) {
    spec.explicit_vehicles = doc.at("vehicles").get<std::vector<int>>();
  }
  return spec;
}

void validate_script(const ScenarioScript& script) {
  if (script.duration <= 0) bad_scenario("duration_s must be positive");
  if (script.map.width <= 0 || script.map.height <= 0) bad_scenario("map extent must be positive");
  if (script.telemetry_period_s < 1) bad_scenario("telemetry_period_s must be >= 1");

  std::set<int> vehicle_ids;
  for (const auto& vehicle : script.fleet) {
    if (!vehicle_ids.insert(vehicle.id).second) {
      bad_scenario("duplicate vehicle id " + std::to_string(vehicle.id));
    }
    if (!script.map.in_bounds(vehicle.pos)) {
      bad_scenario("vehicle " + std::to_string(vehicle.id) + " starts out of bounds");
    }
  }
  std::set<int> artifact_ids;
  for (const auto& artifact : script.artifacts) {
    if (!artifact_ids.insert(artifact.id).second) {
      bad_scenario("duplicate artifact id " + std::to_string(artifact.id));
    }
    if (!script.map.in_bounds(artifact.pos)) bad_scenario("artifact out of bounds");
  }

  std::set<std::string> signals(script.plan.signals.begin(), script.plan.signals.end());
  std::set<int> node_ids;
  for (const auto& node : script.plan.nodes) {
    if (!node_ids.insert(node.id).second) {
      bad_scenario("duplicate plan node id " + std::to_string(node.id));
    }
    if (node.gate_signal && signals.count(*node.gate_signal) == 0) {
      bad_scenario("node " + std::to_string(node.id) + " gated by unknown signal '" +
                   *node.gate_signal + "'");
    }
  }
  for (const auto& node : script.plan.nodes) {
    for (const int pred : node.predecessors) {
      if (node_ids.count(pred) == 0) {
        bad_scenario("node " + std::to_string(node.id) + " references unknown predecessor " +
                     std::to_string(pred));
      }
    }
  }
  // acyclicity via repeated elimination
  {
    std::map<int, std::vector<int>> preds;
    for (const auto& node : script.plan.nodes) preds[node.id] = node.predecessors;
    bool progressed = true;
    while (progressed && !preds.empty()) {
      progressed = false;
      for (auto it = preds.begin(); it != preds.end();) {
        const bool free = std::all_of(it->second.begin(), it->second.end(),
                                      [&](int p) { return preds.count(p) == 0; });
        if (free) {
          it = preds.erase(it);
          progressed = true;
        } else {
          ++it;
        }
      }
    }
    if (!preds.empty()) bad_scenario("mission plan contains a predecessor cycle");
  }

  Timestamp previous = 0;
  bool plan_seen = false;
  for (const auto& action : script.actions) {
    if (action.t < previous) bad_scenario("commander action times must be non-decreasing");
    previous = action.t;
    if (action.type == ActionType::LoadPlan) plan_seen = true;
    if (action.type == ActionType::Signal) {
      if (signals.count(action.signal_name) == 0) {
        bad_scenario("action references unknown signal '" + action.signal_name + "'");
      }
      if (!plan_seen) bad_scenario("signal before load_plan");
    }
    if ((action.type == ActionType::Nudge || action.type == ActionType::Stop ||
         action.type == ActionType::Rtl) &&
        vehicle_ids.count(action.vehicle_id) == 0) {
      bad_scenario("action references unknown vehicle " + std::to_string(action.vehicle_id));
    }
    if ((action.type == ActionType::AuthorTactic || action.type == ActionType::IssueTactic) &&
        !action.tactic) {
      bad_scenario("tactic action without a tactic spec");
    }
  }
}

}  // namespace

ScenarioScript parse_scenario(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    bad_scenario(std::string("bad json: ") + e.what());
  }

  try {
    ScenarioScript script;
    if (!doc.contains("seed")) bad_scenario("a seed is required");
    script.seed = doc.at("seed").get<std::uint64_t>();
    script.duration = doc.at("duration_s").get<std::int64_t>() * 1000;
    script.telemetry_period_s = doc.value("telemetry_period_s", 1);

    const auto& map = doc.at("map");
    script.map.width = map.at("width").get<int>();
    script.map.height = map.at("height").get<int>();
    script.map.launch_zone = parse_rect(map.at("launch_zone"));
    if (map.contains("buildings")) {
      for (const auto& entry : map.at("buildings")) {
        Building building;
        building.id = entry.at("id").get<int>();
        building.bounds = parse_rect(entry.at("bounds"));
        building.door = entry.contains("door") ? parse_pos(entry.at("door"))
                                               : GridPos{building.bounds.x0, building.bounds.center().y};
        script.map.buildings.push_back(building);
      }
    }

    int next_id = 1;
    for (const auto& entry : doc.at("fleet")) {
      Vehicle prototype;
      const auto kind = vehicle_kind_from_string(entry.at("kind").get<std::string>());
      if (!kind) bad_scenario("bad vehicle kind");
      prototype.kind = *kind;
      const auto inst = instantiation_from_string(entry.value("inst", "hardware"));
      if (!inst) bad_scenario("bad vehicle instantiation");
      prototype.inst = *inst;
      const auto camera = camera_from_string(
          entry.value("camera", prototype.kind == VehicleKind::Uav ? "forward" : "both"));
      if (!camera) bad_scenario("bad vehicle camera");
      prototype.camera = *camera;
      const auto payload = payload_from_string(entry.value("payload", "none"));
      if (!payload) bad_scenario("bad vehicle payload");
      prototype.payload = *payload;
      prototype.endurance_s = entry.value("endurance_s", 900);
      if (prototype.endurance_s < 1) bad_scenario("endurance_s must be positive");
      if (entry.contains("start")) prototype.pos = parse_pos(entry.at("start"));
      else prototype.pos = script.map.launch_zone.center();

      const int count = entry.value("count", 1);
      for (int i = 0; i < count; ++i) {
        Vehicle vehicle = prototype;
        vehicle.id = entry.contains("id") && count == 1 ? entry.at("id").get<int>() : next_id;
        next_id = std::max(next_id, vehicle.id) + 1;
        // spread group members across the launch zone row-major
        if (count > 1) {
          const auto& zone = script.map.launch_zone;
          const int width = zone.x1 - zone.x0 + 1;
          const int offset = vehicle.id - 1;
          vehicle.pos = {zone.x0 + offset % width,
                         std::min(zone.y1, zone.y0 + offset / width)};
        }
        script.fleet.push_back(vehicle);
      }
    }

    if (doc.contains("artifacts")) {
      for (const auto& entry : doc.at("artifacts")) {
        Artifact artifact;
        artifact.id = entry.at("id").get<int>();
        const auto type = artifact_type_from_string(entry.at("type").get<std::string>());
        if (!type) bad_scenario("bad artifact type");
        artifact.type = *type;
        artifact.pos = parse_pos(entry.at("pos"));
        artifact.active = entry.value("active", false);
        artifact.threat_radius = entry.value("threat_radius", 2);
        if (entry.contains("required_payloads")) {
          for (const auto& name : entry.at("required_payloads")) {
            const auto payload = payload_from_string(name.get<std::string>());
            if (!payload) bad_scenario("bad required payload");
            artifact.required_payloads.push_back(*payload);
          }
        }
        script.artifacts.push_back(artifact);
      }
    }

    if (doc.contains("plan")) {
      const auto& plan = doc.at("plan");
      if (plan.contains("signals")) {
        script.plan.signals = plan.at("signals").get<std::vector<std::string>>();
      }
      for (const auto& entry : plan.at("nodes")) {
        PlanNode node;
        node.id = entry.at("id").get<int>();
        if (entry.contains("signal")) node.gate_signal = entry.at("signal").get<std::string>();
        if (entry.contains("after")) node.predecessors = entry.at("after").get<std::vector<int>>();
        for (const auto& tactic : entry.at("tactics")) {
          node.tactics.push_back(parse_tactic_spec(tactic));
        }
        script.plan.nodes.push_back(std::move(node));
      }
    }

    if (doc.contains("commander")) {
      for (const auto& entry : doc.at("commander")) {
        CommanderAction action;
        action.t = entry.at("t_s").get<std::int64_t>() * 1000;
        const std::string name = entry.at("action").get<std::string>();
        if (name == "load_plan") action.type = ActionType::LoadPlan;
        else if (name == "signal") action.type = ActionType::Signal;
        else if (name == "author_tactic") action.type = ActionType::AuthorTactic;
        else if (name == "issue_tactic") action.type = ActionType::IssueTactic;
        else if (name == "nudge") action.type = ActionType::Nudge;
        else if (name == "stop") action.type = ActionType::Stop;
        else if (name == "rtl") action.type = ActionType::Rtl;
        else if (name == "deploy_medic") action.type = ActionType::DeployMedic;
        else bad_scenario("unknown commander action '" + name + "'");
        if (entry.contains("name")) action.signal_name = entry.at("name").get<std::string>();
        if (entry.contains("tactic")) action.tactic = parse_tactic_spec(entry.at("tactic"));
        action.authoring_duration = entry.value("duration_s", std::int64_t{0}) * 1000;
        action.vehicle_id = entry.value("vehicle", -1);
        script.actions.push_back(std::move(action));
      }
    }

    if (doc.contains("comm")) {
      const auto& comm = doc.at("comm");
      script.comm.dropout_per_tick = comm.value("dropout_per_tick", 0.0);
      if (comm.contains("zones")) {
        for (const auto& entry : comm.at("zones")) {
          CommZone zone;
          zone.bounds = parse_rect(entry.at("bounds"));
          zone.dropout_per_tick = entry.value("dropout_per_tick", 0.0);
          script.comm.zones.push_back(zone);
        }
      }
    }

    if (doc.contains("demand")) {
      const auto& demand = doc.at("demand");
      script.demand.authoring = demand.value("authoring", script.demand.authoring);
      script.demand.issued_60s = demand.value("issued_60s", script.demand.issued_60s);
      script.demand.blocked = demand.value("blocked", script.demand.blocked);
      script.demand.neutralized_60s =
          demand.value("neutralized_60s", script.demand.neutralized_60s);
      script.demand.cap = demand.value("cap", script.demand.cap);
      if (script.demand.cap <= 0) bad_scenario("demand cap must be positive");
    }

    if (doc.contains("tuning")) {
      const auto& tuning = doc.at("tuning");
      script.tuning.block_threshold_ticks =
          tuning.value("block_threshold_ticks", script.tuning.block_threshold_ticks);
      script.tuning.dwell_neutralize_ticks =
          tuning.value("dwell_neutralize_ticks", script.tuning.dwell_neutralize_ticks);
      script.tuning.revive_delay_s = tuning.value("revive_delay_s", script.tuning.revive_delay_s);
      script.tuning.battery_swap_s = tuning.value("battery_swap_s", script.tuning.battery_swap_s);
      script.tuning.detect_radius = tuning.value("detect_radius", script.tuning.detect_radius);
      script.tuning.surveil_hold_s = tuning.value("surveil_hold_s", script.tuning.surveil_hold_s);
      script.tuning.cordon_hold_s = tuning.value("cordon_hold_s", script.tuning.cordon_hold_s);
      script.tuning.swap_battery_fraction =
          tuning.value("swap_battery_fraction", script.tuning.swap_battery_fraction);
    }

    validate_script(script);
    return script;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    bad_scenario(std::string("bad document: ") + e.what());
  }
}

ScenarioScript parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open scenario: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace swarmload::sim
