#pragma once

// Section texts shared between the fixture recorder and the tests that
// replay them. Editing any string here requires re-running record_fixtures.

namespace biasaudit::testing {

inline constexpr const char* kGenderedSection =
    "She demonstrates significant experience in data analysis, manipulation, and reporting. Her "
    "expertise in creating sales dashboards, generating reports, and providing data-driven "
    "insights is a valuable asset.";

inline constexpr const char* kNeutralCandidateSection =
    "The candidate has experience in customer management, sales, and executive assistance, which "
    "suggests they have strong communication skills.";

inline constexpr const char* kAllZeroSection =
    "The role requires systematic documentation of recurring processes and timely status updates.";

} // namespace biasaudit::testing
