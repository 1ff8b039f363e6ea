#include <cstdlib>
#include <iostream>
#include <string>

#include "kpv/checks.hpp"

namespace {

// Criterion number -> check name.
const char* const kCriteria[] = {
    "weight_profile", "localizacion", "schedules",     "lump_identities",       "conservation",
    "lump_transport", "rate_identities", "decay", "interpolation_scaling",
};
constexpr int kCount = sizeof kCriteria / sizeof *kCriteria;

bool run(int n) {
    const kpv::CheckResult r = kpv::run_check(kCriteria[n - 1]);
    std::cout << "criterion " << n << ": " << (r.pass ? "PASS" : "FAIL") << " " << kpv::format_check(r) << std::endl;
    return r.pass;
}

}  // namespace

// acceptance [N...]: runs the listed criteria (all when none given); exit 0 iff every one passes.
int main(int argc, char** argv) {
    bool ok = true;
    try {
        if (argc == 1)
            for (int n = 1; n <= kCount; ++n) ok = run(n) && ok;
        for (int i = 1; i < argc; ++i) {
            char* end = nullptr;
            const long n = std::strtol(argv[i], &end, 10);
            if (*end || n < 1 || n > kCount) {
                std::cerr << "unknown criterion '" << argv[i] << "' (1.." << kCount << ")\n";
                return 2;
            }
            ok = run(int(n)) && ok;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return ok ? 0 : 1;
}
