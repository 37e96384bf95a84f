// Runs the built-in validation suite and prints one pass/fail line per
// criterion. Exit code is the number of failures. SRSMILE_QUICK=1 cuts Monte
// Carlo path counts 10x; SRSMILE_ONLY=csv restricts to listed criteria.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "srsmile/validation.hpp"

int main() {
    srsmile::ValidationConfig cfg;
    if (const char* q = std::getenv("SRSMILE_QUICK")) cfg.quick = std::string(q) == "1";
    std::vector<int> only;
    if (const char* o = std::getenv("SRSMILE_ONLY")) {
        std::string s(o);
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t next = s.find(',', pos);
            if (next == std::string::npos) next = s.size();
            only.push_back(std::atoi(s.substr(pos, next - pos).c_str()));
            pos = next + 1;
        }
    }

    const auto results = srsmile::run_validation(cfg, only);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("[%s] criterion %d (%s) in %.1fs: %s\n", r.pass ? "PASS" : "FAIL", r.index,
                    r.name.c_str(), r.seconds, r.details.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failures);
    return failures;
}
