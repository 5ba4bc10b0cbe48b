#pragma once
// Debate-trace wire format: one JSON object per input, newline-delimited when
// streamed. Field order is fixed and numbers carry 17 significant digits so
// parse(serialize(t)) == t bit-for-bit.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mad/types.hpp"

namespace mad {

std::string serialize_trace(const DebateTrace& trace);
DebateTrace parse_trace(std::string_view bytes); // raises malformed_trace

void write_trace_stream(std::ostream& out, const std::vector<DebateTrace>& traces);
std::vector<DebateTrace> read_trace_stream(std::istream& in);

// %.17g rendering shared by every JSON/CSV emitter in the project
std::string format_double(double v);

// 64-bit FNV-1a rendered as 16 hex chars; used for config digests
std::string hex_digest(std::string_view bytes);

} // namespace mad
