#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "synthforge/demo_assets.hpp"
#include "synthforge/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthforge-demo-assets: write a small procedural demo workspace"};
    std::string out_dir = "demo";
    int classes = 3, backgrounds = 6, images_per_class = 10;
    app.add_option("--out", out_dir, "Workspace directory")->capture_default_str();
    app.add_option("--classes", classes, "Number of demo classes")->capture_default_str();
    app.add_option("--backgrounds", backgrounds, "Number of backgrounds")->capture_default_str();
    app.add_option("--images-per-class", images_per_class, "images_per_class in the config")
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = synthforge::demo::write_demo_workspace(out_dir, classes, backgrounds,
                                                                   images_per_class);
        std::printf("demo workspace ready; run:\n  synthforge generate --config %s\n",
                    config.string().c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
