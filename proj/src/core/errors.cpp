#include "core/errors.hpp"

namespace biasaudit {

const char* errc_name(errc c) {
    switch (c) {
        case errc::none: return "ok";
        case errc::invalid_argument: return "invalid_argument";
        case errc::config: return "config";
        case errc::io: return "io";
        case errc::empty_input: return "empty_input";
        case errc::token_limit_exceeded: return "token_limit_exceeded";
        case errc::injection_suspected: return "injection_suspected";
        case errc::insufficient_corpus: return "insufficient_corpus";
        case errc::span_out_of_bounds: return "span_out_of_bounds";
        case errc::backend_unavailable: return "backend_unavailable";
        case errc::schema_validation_exhausted: return "schema_validation_exhausted";
        case errc::fixture_miss: return "fixture_miss";
        case errc::provider: return "provider";
        case errc::rate_limited: return "rate_limited";
        case errc::endpoint: return "endpoint";
        case errc::sector_mismatch: return "sector_mismatch";
        case errc::mixed_input_kinds: return "mixed_input_kinds";
        case errc::key_mismatch: return "key_mismatch";
        case errc::zero_denominator: return "zero_denominator";
        case errc::incomplete_coverage: return "incomplete_coverage";
        case errc::empty_data: return "empty_data";
        case errc::spec_mismatch: return "spec_mismatch";
        case errc::tolerance_exceeded: return "tolerance_exceeded";
        case errc::out_of_range: return "out_of_range";
    }
    return "unknown";
}

} // namespace biasaudit
