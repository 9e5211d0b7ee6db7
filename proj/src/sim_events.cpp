#include "swarmload/sim/events.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "swarmload/errors.hpp"

namespace swarmload::sim {

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::TacticCreated: return "tactic_created";
    case EventType::TacticIssued: return "tactic_issued";
    case EventType::TacticCompleted: return "tactic_completed";
    case EventType::TacticFailed: return "tactic_failed";
    case EventType::Signal: return "signal";
    case EventType::Blocked: return "blocked";
    case EventType::Neutralized: return "neutralized";
    case EventType::Revived: return "revived";
    case EventType::Rtl: return "rtl";
    case EventType::SwapRequested: return "swap_requested";
    case EventType::SwapCompleted: return "swap_completed";
    case EventType::AllocationFailed: return "allocation_failed";
    case EventType::Telemetry: return "telemetry";
    case EventType::CommLoss: return "comm_loss";
    case EventType::CommRestore: return "comm_restore";
    case EventType::ArtifactDetected: return "artifact_detected";
    case EventType::ArtifactNeutralized: return "artifact_neutralized";
  }
  return "?";
}

std::optional<EventType> event_type_from_string(std::string_view name) {
  for (const auto type :
       {EventType::TacticCreated, EventType::TacticIssued, EventType::TacticCompleted,
        EventType::TacticFailed, EventType::Signal, EventType::Blocked, EventType::Neutralized,
        EventType::Revived, EventType::Rtl, EventType::SwapRequested, EventType::SwapCompleted,
        EventType::AllocationFailed, EventType::Telemetry, EventType::CommLoss,
        EventType::CommRestore, EventType::ArtifactDetected, EventType::ArtifactNeutralized}) {
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

namespace {

bool is_tactic_event(EventType type) {
  return type == EventType::TacticCreated || type == EventType::TacticIssued ||
         type == EventType::TacticCompleted || type == EventType::TacticFailed;
}

bool is_vehicle_event(EventType type) {
  return type == EventType::Blocked || type == EventType::Neutralized ||
         type == EventType::Revived || type == EventType::Rtl ||
         type == EventType::SwapRequested || type == EventType::SwapCompleted ||
         type == EventType::Telemetry || type == EventType::CommLoss ||
         type == EventType::CommRestore;
}

void append_number(std::string& out, double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  out.append(buffer, ptr);
}

void append_escaped(std::string& out, std::string_view text) {
  out.push_back('"');
  for (const char c : text) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buffer[8];
      std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
      out.append(buffer);
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
}

// Hand-rolled writer: the telemetry stream makes logs large, and the output
// must be byte-stable, so fields are emitted in one fixed order.
void append_event(std::string& out, const Event& event) {
  out += "{\"t_ms\":";
  out += std::to_string(event.t);
  out += ",\"type\":\"";
  out += to_string(event.type);
  out += '"';

  if (is_tactic_event(event.type) || event.tactic_id >= 0) {
    out += ",\"tactic_id\":";
    out += std::to_string(event.tactic_id);
    if (is_tactic_event(event.type)) {
      out += ",\"tactic\":\"";
      out += to_string(event.tactic_kind);
      out += "\",\"origin\":\"";
      out += to_string(event.origin);
      out += '"';
    }
  }
  if (!event.assigned.empty()) {
    out += ",\"assigned\":[";
    for (std::size_t i = 0; i < event.assigned.size(); ++i) {
      const auto& ref = event.assigned[i];
      if (i > 0) out += ',';
      out += "{\"id\":";
      out += std::to_string(ref.id);
      out += ",\"kind\":\"";
      out += to_string(ref.kind);
      out += "\",\"inst\":\"";
      out += to_string(ref.inst);
      out += "\"}";
    }
    out += ']';
  }
  if (is_vehicle_event(event.type)) {
    out += ",\"vehicle\":";
    out += std::to_string(event.vehicle.id);
    out += ",\"kind\":\"";
    out += to_string(event.vehicle.kind);
    out += "\",\"inst\":\"";
    out += to_string(event.vehicle.inst);
    out += '"';
  }
  if (event.type == EventType::Telemetry) {
    out += ",\"status\":\"";
    out += to_string(event.status);
    out += "\",\"x\":";
    out += std::to_string(event.pos.x);
    out += ",\"y\":";
    out += std::to_string(event.pos.y);
    out += ",\"band\":\"";
    out += to_string(event.band);
    out += "\",\"battery\":";
    append_number(out, event.battery);
  }
  if (event.type == EventType::ArtifactDetected ||
      event.type == EventType::ArtifactNeutralized) {
    out += ",\"artifact\":";
    out += std::to_string(event.artifact_id);
    out += ",\"artifact_type\":\"";
    out += to_string(event.artifact_type);
    out += '"';
    if (event.vehicle.id >= 0) {
      out += ",\"vehicle\":";
      out += std::to_string(event.vehicle.id);
    }
  }
  if (!event.detail.empty()) {
    out += event.type == EventType::Signal ? ",\"name\":" : ",\"detail\":";
    append_escaped(out, event.detail);
  }
  out += "}\n";
}

}  // namespace

std::string events_to_jsonl(const EventLog& log) {
  std::string out;
  out.reserve(log.size() * 96);
  for (const auto& event : log) append_event(out, event);
  return out;
}

void write_events_jsonl(std::ostream& out, const EventLog& log) {
  out << events_to_jsonl(log);
}

EventParseResult read_events_jsonl(std::istream& in) {
  EventParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, std::string("bad json: ") + e.what()});
      continue;
    }
    const std::string type_name = doc.value("type", "");
    const auto type = event_type_from_string(type_name);
    if (!type) {
      result.errors.push_back({line_no, "unknown event type '" + type_name + "'"});
      continue;
    }
    try {
      Event event;
      event.t = doc.at("t_ms").get<Timestamp>();
      event.type = *type;
      event.tactic_id = doc.value("tactic_id", -1);
      if (doc.contains("tactic")) {
        if (const auto kind = tactic_kind_from_string(doc.at("tactic").get<std::string>())) {
          event.tactic_kind = *kind;
        }
      }
      if (doc.contains("origin")) {
        if (const auto origin = tactic_origin_from_string(doc.at("origin").get<std::string>())) {
          event.origin = *origin;
        }
      }
      if (doc.contains("assigned")) {
        for (const auto& entry : doc.at("assigned")) {
          VehicleRef ref;
          ref.id = entry.at("id").get<std::int32_t>();
          ref.kind = vehicle_kind_from_string(entry.value("kind", "ugv")).value_or(VehicleKind::Ugv);
          ref.inst = instantiation_from_string(entry.value("inst", "hardware"))
                         .value_or(Instantiation::Hardware);
          event.assigned.push_back(ref);
        }
      }
      if (doc.contains("vehicle")) {
        event.vehicle.id = doc.at("vehicle").get<std::int32_t>();
        event.vehicle.kind =
            vehicle_kind_from_string(doc.value("kind", "ugv")).value_or(VehicleKind::Ugv);
        event.vehicle.inst = instantiation_from_string(doc.value("inst", "hardware"))
                                 .value_or(Instantiation::Hardware);
      }
      if (doc.contains("status")) {
        event.status = vehicle_status_from_string(doc.at("status").get<std::string>())
                           .value_or(VehicleStatus::Idle);
      }
      if (doc.contains("x")) event.pos = {doc.at("x").get<int>(), doc.at("y").get<int>()};
      event.battery = doc.value("battery", 0.0);
      event.artifact_id = doc.value("artifact", -1);
      if (doc.contains("artifact_type")) {
        event.artifact_type =
            artifact_type_from_string(doc.at("artifact_type").get<std::string>())
                .value_or(ArtifactType::Intel);
      }
      event.detail = doc.value("name", doc.value("detail", ""));
      result.events.push_back(std::move(event));
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, std::string("bad event: ") + e.what()});
    }
  }
  return result;
}

EventParseResult read_events_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open event log: " + path);
  return read_events_jsonl(in);
}

void write_demand_csv(std::ostream& out, const DemandTrace& trace) {
  out << "t_ms,demand\n";
  std::string line;
  for (std::size_t i = 0; i < trace.demand.size(); ++i) {
    line.clear();
    line += std::to_string(i * 1000);
    line += ',';
    append_number(line, trace.demand[i]);
    line += '\n';
    out << line;
  }
}

DemandTrace read_demand_csv(std::istream& in) {
  DemandTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::FormatError, "demand csv: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_ms,demand") {
    throw Error(Errc::FormatError, "demand csv: expected header 't_ms,demand'");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(Errc::FormatError, "demand csv: malformed row '" + line + "'");
    }
    trace.demand.push_back(std::stod(line.substr(comma + 1)));
  }
  return trace;
}

}  // namespace swarmload::sim
