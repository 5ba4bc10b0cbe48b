#pragma once
// Error taxonomy shared by every module. Each failure carries a code so the
// CLI can map it to an exit class (config / data / numeric).

#include <stdexcept>
#include <string>

namespace mad {

enum class Err {
    // configuration
    config_error,
    // data / input
    parse_error,
    schema_mismatch,
    insufficient_rows,
    empty_train,
    empty_scores,
    empty_calibration,
    single_class,
    no_positives,
    no_usable_slices,
    single_agent,
    kind_column_mismatch,
    malformed_trace,
    // numeric
    negative_weight,
    not_normalizable,
    dimension_mismatch,
    degenerate_train,
    bound_violation,
    numeric_error,
};

const char* err_name(Err code);

struct MadError : std::runtime_error {
    Err code;
    MadError(Err c, const std::string& msg)
        : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void raise(Err code, const std::string& msg) {
    throw MadError(code, msg);
}

// Exit classes: 2 = config error, 3 = data error, 4 = numerical error.
int exit_code_for(Err code);

} // namespace mad
