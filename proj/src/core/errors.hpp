#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace biasaudit {

// Error taxonomy shared by the whole library. The C API maps these 1:1 onto
// ba_status codes, so additions here need a matching entry in biasaudit.h.
enum class errc {
    none = 0,
    invalid_argument,
    config,
    io,
    empty_input,
    token_limit_exceeded,
    injection_suspected,
    insufficient_corpus,
    span_out_of_bounds,
    backend_unavailable,
    schema_validation_exhausted,
    fixture_miss,
    provider,
    rate_limited,
    endpoint,
    sector_mismatch,
    mixed_input_kinds,
    key_mismatch,
    zero_denominator,
    incomplete_coverage,
    empty_data,
    spec_mismatch,
    tolerance_exceeded,
    out_of_range,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
public:
    error(errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
    throw error(code, msg);
}

} // namespace biasaudit
