#include <cstdio>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "volterra/acceptance.hpp"

int main(int argc, char** argv) {
    std::string manifest_path;
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--manifest") == 0 && i + 1 < argc) {
            manifest_path = argv[++i];
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr,
                         "usage: %s --manifest tolerances.json [--only N]...\n",
                         argv[0]);
            return 1;
        }
    }
    if (manifest_path.empty()) {
        std::fprintf(stderr, "missing --manifest\n");
        return 1;
    }
    try {
        const auto manifest = volterra::load_manifest(manifest_path);
        const auto summary = volterra::run_acceptance(manifest, only);
        for (const auto& r : summary.results)
            std::printf("criterion %2d %-32s %s (%s) [%.1fs]\n", r.id,
                        r.name.c_str(), r.passed ? "PASS" : "FAIL",
                        r.detail.c_str(), r.seconds);
        std::fflush(stdout);
        return summary.all_passed() ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
