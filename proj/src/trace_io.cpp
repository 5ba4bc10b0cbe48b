#include "mad/trace_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mad/rng.hpp"

namespace mad {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string hex_digest(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, detail::fnv1a64(bytes));
    return buf;
}

namespace {

void append_escaped(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

void append_number_array(std::string& out, const std::vector<double>& v) {
    out.push_back('[');
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(',');
        out += format_double(v[i]);
    }
    out.push_back(']');
}

} // namespace

std::string serialize_trace(const DebateTrace& trace) {
    validate_trace(trace);
    std::string out;
    out.reserve(512 + trace.rounds.size() * 512);
    out += "{\"input_id\":";
    append_escaped(out, trace.input_id);
    out += ",\"config_digest\":";
    append_escaped(out, trace.config_digest);
    out += ",\"final_score\":";
    out += format_double(trace.final_score);
    out += ",\"rounds\":[";
    for (size_t r = 0; r < trace.rounds.size(); ++r) {
        const RoundRecord& round = trace.rounds[r];
        if (r) out.push_back(',');
        out += "{\"messages\":[";
        for (size_t i = 0; i < round.messages.size(); ++i) {
            const Message& m = round.messages[i];
            if (i) out.push_back(',');
            out += "{\"agent_id\":" + std::to_string(m.agent_id);
            out += ",\"score\":" + format_double(m.score);
            out += ",\"confidence\":" + format_double(m.confidence);
            out += ",\"attribution\":";
            append_number_array(out, m.evidence.attribution);
            out += ",\"rationale\":";
            if (m.evidence.rationale)
                append_escaped(out, *m.evidence.rationale);
            else
                out += "null";
            out.push_back('}');
        }
        out += "],\"losses\":{\"total\":";
        append_number_array(out, round.losses.total);
        out += ",\"pred\":";
        append_number_array(out, round.losses.pred);
        out += ",\"dispute\":";
        append_number_array(out, round.losses.dispute);
        out += ",\"evidence\":";
        append_number_array(out, round.losses.evidence);
        out += "},\"weights_before\":";
        append_number_array(out, round.weights_before.values());
        out += ",\"weights_after\":";
        append_number_array(out, round.weights_after.values());
        out += ",\"aggregate_score\":";
        out += format_double(round.aggregate_score);
        out.push_back('}');
    }
    out += "]}";
    return out;
}

namespace {

using json = nlohmann::json;

const json& field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) raise(Err::malformed_trace, std::string("missing field '") + key + "'");
    return *it;
}

double as_number(const json& v, const char* what) {
    if (!v.is_number()) raise(Err::malformed_trace, std::string(what) + " is not a number");
    return v.get<double>();
}

std::vector<double> as_number_array(const json& v, const char* what) {
    if (!v.is_array()) raise(Err::malformed_trace, std::string(what) + " is not an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) out.push_back(as_number(e, what));
    return out;
}

WeightVector as_weights(const json& v, const char* what) {
    std::vector<double> raw = as_number_array(v, what);
    try {
        return WeightVector::validated(std::move(raw));
    } catch (const MadError&) {
        raise(Err::malformed_trace, std::string(what) + " is not a simplex point");
    }
}

} // namespace

DebateTrace parse_trace(std::string_view bytes) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) raise(Err::malformed_trace, "invalid JSON");

    DebateTrace trace;
    const json& id = field(doc, "input_id");
    if (!id.is_string()) raise(Err::malformed_trace, "input_id is not a string");
    trace.input_id = id.get<std::string>();
    const json& digest = field(doc, "config_digest");
    if (!digest.is_string()) raise(Err::malformed_trace, "config_digest is not a string");
    trace.config_digest = digest.get<std::string>();
    trace.final_score = as_number(field(doc, "final_score"), "final_score");

    const json& rounds = field(doc, "rounds");
    if (!rounds.is_array()) raise(Err::malformed_trace, "rounds is not an array");
    for (const json& jr : rounds) {
        if (!jr.is_object()) raise(Err::malformed_trace, "round is not an object");
        RoundRecord round;
        const json& messages = field(jr, "messages");
        if (!messages.is_array()) raise(Err::malformed_trace, "messages is not an array");
        for (const json& jm : messages) {
            Message m;
            const json& agent = field(jm, "agent_id");
            if (!agent.is_number_unsigned()) raise(Err::malformed_trace, "agent_id is not an index");
            m.agent_id = agent.get<size_t>();
            m.score = as_number(field(jm, "score"), "score");
            m.confidence = as_number(field(jm, "confidence"), "confidence");
            m.evidence.attribution = as_number_array(field(jm, "attribution"), "attribution");
            const json& rationale = field(jm, "rationale");
            if (rationale.is_string())
                m.evidence.rationale = rationale.get<std::string>();
            else if (!rationale.is_null())
                raise(Err::malformed_trace, "rationale is neither string nor null");
            round.messages.push_back(std::move(m));
        }
        const json& losses = field(jr, "losses");
        round.losses.total = as_number_array(field(losses, "total"), "losses.total");
        round.losses.pred = as_number_array(field(losses, "pred"), "losses.pred");
        round.losses.dispute = as_number_array(field(losses, "dispute"), "losses.dispute");
        round.losses.evidence = as_number_array(field(losses, "evidence"), "losses.evidence");
        round.weights_before = as_weights(field(jr, "weights_before"), "weights_before");
        round.weights_after = as_weights(field(jr, "weights_after"), "weights_after");
        round.aggregate_score = as_number(field(jr, "aggregate_score"), "aggregate_score");
        trace.rounds.push_back(std::move(round));
    }
    validate_trace(trace);
    return trace;
}

void write_trace_stream(std::ostream& out, const std::vector<DebateTrace>& traces) {
    for (const DebateTrace& t : traces) out << serialize_trace(t) << '\n';
}

std::vector<DebateTrace> read_trace_stream(std::istream& in) {
    std::vector<DebateTrace> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(parse_trace(line));
    }
    return out;
}

} // namespace mad
