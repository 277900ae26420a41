// Regenerates the shipped language profiles from the training texts:
//   train_profiles <sources_dir> <profiles_dir>
// Every <sources_dir>/<code>.txt becomes <profiles_dir>/<code>.profile.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "depcc/common.hpp"
#include "depcc/langid.hpp"

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <sources_dir> <profiles_dir>\n", argv[0]);
        return 1;
    }
    namespace fs = std::filesystem;
    try {
        fs::create_directories(argv[2]);
        std::vector<fs::path> sources;
        for (const auto& entry : fs::directory_iterator(argv[1])) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                sources.push_back(entry.path());
            }
        }
        if (sources.empty()) {
            std::fprintf(stderr, "no .txt training files in %s\n", argv[1]);
            return 1;
        }
        for (const fs::path& source : sources) {
            std::string code = source.stem().string();
            depcc::LanguageProfile profile =
                depcc::build_profile(depcc::read_file(source.string()), code);
            fs::path out = fs::path(argv[2]) / (code + ".profile");
            depcc::save_profile(profile, out.string());
            std::printf("%s\t%zu n-grams\n", out.string().c_str(),
                        profile.ngrams.size());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
