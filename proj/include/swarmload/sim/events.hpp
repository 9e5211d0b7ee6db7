// Typed simulator event log. Serialized as JSONL, one object per line with a
// `type` discriminator; the analytics module consumes the same schema.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swarmload/sim/model.hpp"
#include "swarmload/types.hpp"

namespace swarmload::sim {

enum class EventType : std::uint8_t {
  TacticCreated,
  TacticIssued,
  TacticCompleted,
  TacticFailed,
  Signal,
  Blocked,
  Neutralized,  ///< a vehicle
  Revived,
  Rtl,
  SwapRequested,
  SwapCompleted,
  AllocationFailed,
  Telemetry,
  CommLoss,
  CommRestore,
  ArtifactDetected,
  ArtifactNeutralized,
};

std::string_view to_string(EventType type);
std::optional<EventType> event_type_from_string(std::string_view name);

struct VehicleRef {
  std::int32_t id = -1;
  VehicleKind kind = VehicleKind::Ugv;
  Instantiation inst = Instantiation::Hardware;
  bool operator==(const VehicleRef&) const = default;
};

/// Flat event record; which fields are meaningful depends on `type`. Kept
/// plain so multi-hour logs stay cheap to build and compare.
struct Event {
  Timestamp t = 0;
  EventType type = EventType::Telemetry;

  std::int32_t tactic_id = -1;
  TacticKind tactic_kind = TacticKind::Goto;
  TacticOrigin origin = TacticOrigin::Commander;
  std::vector<VehicleRef> assigned;

  VehicleRef vehicle{};
  VehicleStatus status = VehicleStatus::Idle;
  AltitudeBand band = AltitudeBand::Ground;
  GridPos pos{};
  double battery = 0.0;

  std::int32_t artifact_id = -1;
  ArtifactType artifact_type = ArtifactType::Intel;

  std::string detail;  ///< signal name / failure reason

  bool operator==(const Event&) const = default;
};

using EventLog = std::vector<Event>;

void write_events_jsonl(std::ostream& out, const EventLog& log);
std::string events_to_jsonl(const EventLog& log);

struct EventParseResult {
  EventLog events;
  std::vector<std::pair<std::size_t, std::string>> errors;  ///< (line, message)
};

/// Parse an event-log JSONL stream. Unknown event types and malformed lines
/// become row errors; the rest of the stream is kept.
EventParseResult read_events_jsonl(std::istream& in);
EventParseResult read_events_jsonl_file(const std::string& path);

/// 1 Hz commander task-demand series derived while the simulation runs.
struct DemandTrace {
  std::vector<double> demand;  ///< index = second since shift start, in [0,1]
};

void write_demand_csv(std::ostream& out, const DemandTrace& trace);
DemandTrace read_demand_csv(std::istream& in);

}  // namespace swarmload::sim
