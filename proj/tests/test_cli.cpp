#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"
#include "liqsurf/cli.hpp"
#include "liqsurf/image_io.hpp"
#include "liqsurf/report_io.hpp"

using namespace liqsurf;

namespace {

int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "liqsurf");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

struct Fixture {
    std::filesystem::path dir = testutil::temp_dir("cli");
    std::string image = (dir / "bands.png").string();
    std::string vessel = (dir / "vessel.txt").string();

    Fixture()
    {
        write_png(image, testutil::gray_to_rgb(testutil::bands(60, 80, 40, 200.0, 90.0)));
        std::ofstream out(vessel);
        for (int y = 5; y <= 74; ++y) {
            out << y << " 8 51\n";
        }
    }
};

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("detect writes a report with the band boundary")
    {
        Fixture f;
        const auto out = (f.dir / "r.json").string();
        const auto png = (f.dir / "a.png").string();
        REQUIRE(run({"detect", f.image, "--vessel", f.vessel, "--out", out, "--annotate", png}) == kExitOk);
        const auto j = nlohmann::json::parse(read_text_file(out));
        CHECK(j["schema_version"] == 1);
        CHECK(j["image_id"] == "bands");
        REQUIRE(j["accepted"].size() == 1);
        CHECK(j["accepted"][0]["center_row"] == 40);
        CHECK(j["ceiling_row"] == 5);
        CHECK(j["floor_row"] == 74);
        CHECK(read_image(png).width() == 60);
        const auto back = report_from_json(read_text_file(out));
        CHECK(report_to_json(back) == read_text_file(out));
    }

    TEST_CASE("detect output does not depend on the thread count")
    {
        Fixture f;
        const auto a = (f.dir / "t1.json").string();
        const auto b = (f.dir / "t3.json").string();
        REQUIRE(run({"detect", f.image, "--vessel", f.vessel, "--out", a, "--threads", "1", "--preset", "entry14"}) ==
                kExitOk);
        REQUIRE(run({"detect", f.image, "--vessel", f.vessel, "--out", b, "--threads", "3", "--preset", "entry14"}) ==
                kExitOk);
        CHECK(read_text_file(a) == read_text_file(b));
    }

    TEST_CASE("exit codes")
    {
        Fixture f;
        const auto out = (f.dir / "none.json").string();
        CHECK(run({}) == kExitUsage);
        CHECK(run({"frobnicate"}) == kExitUsage);
        CHECK(run({"detect", f.image}) == kExitUsage);
        CHECK(run({"synth", (f.dir / "c").string(), "--n", "0"}) == kExitUsage);
        CHECK(run({"synth", (f.dir / "c").string(), "--profile", "hard"}) == kExitUsage);

        CHECK(run({"detect", (f.dir / "missing.png").string(), "--vessel", f.vessel, "--out", out}) == kExitIo);
        CHECK(run({"detect", f.image, "--vessel", (f.dir / "missing.txt").string(), "--out", out}) == kExitIo);
        CHECK_FALSE(std::filesystem::exists(out));
        CHECK(run({"eval", (f.dir / "no_corpus").string()}) == kExitIo);
        CHECK(run({"detect", f.image, "--vessel", f.vessel, "--config", (f.dir / "none.ini").string()}) == kExitIo);

        CHECK(run({"detect", f.image, "--vessel", f.vessel, "--preset", "entry16"}) == kExitConfig);
        {
            std::ofstream(f.dir / "bad.ini") << "[selection]\nthreshold = 2\n";
        }
        CHECK(run({"detect", f.image, "--vessel", f.vessel, "--config", (f.dir / "bad.ini").string()}) ==
              kExitConfig);
        CHECK_FALSE(std::filesystem::exists(out));
    }

    TEST_CASE("synth, eval and sweep run end to end")
    {
        Fixture f;
        const auto corpus = (f.dir / "corpus").string();
        REQUIRE(run({"synth", corpus, "--n", "2", "--seed", "4", "--profile", "glare"}) == kExitOk);
        {
            std::ofstream(f.dir / "fast.ini") << "preset = entry22\n[scan]\nheight_step = 3\n";
        }
        const auto cfg = (f.dir / "fast.ini").string();
        const auto eval_json = (f.dir / "eval.json").string();
        CHECK(run({"eval", corpus, "--config", cfg, "--out", eval_json}) == kExitOk);
        CHECK(nlohmann::json::parse(read_text_file(eval_json))["images"] == 2);
        CHECK(run({"sweep", corpus, "--config", cfg, "--t", "0.3,0.6"}) == kExitOk);
        CHECK(run({"sweep", corpus, "--config", cfg, "--t", "1.5"}) == kExitConfig);
    }

    TEST_CASE("the installed binary reports usage errors")
    {
        const int status = std::system((std::string(LIQSURF_CLI_PATH) + " synth >/dev/null 2>&1").c_str());
        REQUIRE(WIFEXITED(status));
        CHECK(WEXITSTATUS(status) == kExitUsage);
    }
}
