#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lesionforge/cli/commands.hpp"
#include "lesionforge/cli/manifest.hpp"
#include "lesionforge/cli/run_config.hpp"
#include "lesionforge/error.hpp"
#include "lesionforge/nifti.hpp"
#include "support/fixtures.hpp"

using namespace lesionforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTmp : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          (std::string("lesionforge_cli_") +
           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  void write(const fs::path& rel, const std::string& text) {
    fs::create_directories((dir / rel).parent_path());
    std::ofstream(dir / rel) << text;
  }

  fs::path dir;
};

cli::RunConfig gamma_only_config(const fs::path& manifest, const fs::path& out,
                                 std::size_t samples) {
  cli::RunConfig config;
  config.manifest = manifest.string();
  config.output_dir = out.string();
  config.seed = config.pipeline.seed = 2024;
  config.pipeline.samples_per_study = samples;
  config.pipeline.ops.push_back(default_op("local-gamma"));
  return config;
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(RunConfigJson, RoundTrip) {
  cli::RunConfig config;
  config.manifest = "studies.csv";
  config.output_dir = "out";
  config.seed = 11;
  config.workers = 3;
  config.output_datatype = nifti::OutputDatatype::Float64;
  config.gzip_level = 1;
  config.pipeline.ops.push_back(default_op("local-gamma"));
  config.pipeline.ops.push_back(default_op("mirror"));
  config.pipeline.seed = 11;
  const auto text = cli::serialize_run_config(config);
  EXPECT_EQ(cli::parse_run_config(text), config);
}

TEST(RunConfigJson, TopLevelSeedWinsAndErrors) {
  const auto c = cli::parse_run_config(
      R"({"manifest": "m.csv", "seed": 5, "pipeline": {"seed": 9, "ops": []}})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.pipeline.seed, 5u);
  for (const char* text : {R"({"manifest": "m.csv", "wokers": 2})", R"({"seed": 1})",
                           R"({"manifest": "m.csv", "workers": 0})",
                           R"({"manifest": "m.csv", "gzip_level": 10})"}) {
    EXPECT_THROW(cli::parse_run_config(text), Error) << text;
  }
}

TEST_F(CliTmp, StudyManifest) {
  write("m.csv", "study_id, mask, b1000, flair\nA, a_mask.nii, a_b.nii, a_f.nii\nB,, b_b.nii,\n");
  const auto rows = cli::parse_study_manifest(dir / "m.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].study_id, "A");
  EXPECT_EQ(*rows[0].mask, dir / "a_mask.nii");
  EXPECT_EQ(rows[0].channels.size(), 2u);
  EXPECT_FALSE(rows[1].mask.has_value());
  EXPECT_EQ(rows[1].channels.size(), 1u);
  EXPECT_EQ(rows[1].channels.at("b1000"), dir / "b_b.nii");

  write("dup.csv", "study_id,mask,b0\nA,,x\nA,,y\n");
  try {
    cli::parse_study_manifest(dir / "dup.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateId);
  }
}

TEST_F(CliTmp, MetricsManifest) {
  write("m.csv", "study_id,prediction_path,actual_label\nA,a.nii,1\nB,/abs/b.nii,0\n");
  const auto rows = cli::parse_metrics_manifest(dir / "m.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].actual);
  EXPECT_EQ(rows[1].prediction, fs::path("/abs/b.nii"));
  write("bad.csv", "study_id,prediction_path,actual_label\nA,a.nii,2\n");
  EXPECT_THROW(cli::parse_metrics_manifest(dir / "bad.csv"), Error);
}

TEST_F(CliTmp, AugmentSamplesAreDistinctAndReproducible) {
  const auto fx = testkit::write_study_fixture(dir, 2, {8, 8, 8}, {"b1000", "flair"}, 1);
  auto config = gamma_only_config(fx.manifest, dir / "out1", 3);
  const auto summary = cli::run_augment(config, dir);
  ASSERT_TRUE(summary.ok()) << (summary.diagnostics.empty() ? "" : summary.diagnostics[0]);
  EXPECT_EQ(summary.studies_ok, 2u);

  std::set<double> gammas;
  for (int k = 0; k < 3; ++k) {
    const auto side = load_json(dir / "out1" / ("study0_aug" + std::to_string(k) + ".json"));
    EXPECT_EQ(side.at("sample_index"), k);
    EXPECT_EQ(side.at("mask"), "present");
    gammas.insert(side.at("ops")[0].at("values").at("gamma").get<double>());
    EXPECT_TRUE(fs::exists(dir / "out1" / ("study0_aug" + std::to_string(k) + "_mask.nii.gz")));
  }
  EXPECT_EQ(gammas.size(), 3u);

  config.output_dir = (dir / "out2").string();
  config.workers = 3;
  ASSERT_TRUE(cli::run_augment(config, dir).ok());
  std::string diff;
  EXPECT_TRUE(testkit::trees_identical(dir / "out1", dir / "out2", &diff)) << diff;

  // FLAIR is untouched by local gamma, up to the float32 write.
  const auto [orig, h0] = nifti::read_volume(dir / "in" / "study0_flair.nii.gz");
  const auto [aug, h1] = nifti::read_volume(dir / "out1" / "study0_aug0_flair.nii.gz");
  EXPECT_TRUE(bit_identical(orig, aug));
}

TEST_F(CliTmp, AugmentWithoutMaskFallsBackToGlobal) {
  const auto fx = testkit::write_study_fixture(dir, 2, {6, 6, 6}, {"b1000"}, 2, {1});
  const auto config = gamma_only_config(fx.manifest, dir / "out", 1);
  ASSERT_TRUE(cli::run_augment(config, dir).ok());
  const auto side = load_json(dir / "out" / "study1_aug0.json");
  EXPECT_EQ(side.at("mask"), "absent");
  ASSERT_FALSE(side.at("notes").empty());
  EXPECT_NE(side.at("notes")[0].get<std::string>().find("global"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "study1_aug0_mask.nii.gz"));

  const double g = side.at("ops")[0].at("values").at("gamma").get<double>();
  const auto [orig, h0] = nifti::read_volume(dir / "in" / "study1_b1000.nii.gz");
  const auto [aug, h1] = nifti::read_volume(dir / "out" / "study1_aug0_b1000.nii.gz");
  const auto expected = gamma_global(orig, g);
  for (std::size_t n = 0; n < orig.size(); ++n) {
    ASSERT_EQ(aug[n], static_cast<double>(static_cast<float>(expected[n])));
  }
}

TEST_F(CliTmp, AugmentReportsBadStudyAndContinues) {
  const auto fx = testkit::write_study_fixture(dir, 3, {6, 6, 6}, {"b1000"}, 3);
  fs::remove(dir / "in" / "study1_b1000.nii.gz");
  const auto config = gamma_only_config(fx.manifest, dir / "out", 1);
  const auto summary = cli::run_augment(config, dir);
  EXPECT_EQ(summary.studies_ok, 2u);
  EXPECT_EQ(summary.studies_failed, 1u);
  ASSERT_EQ(summary.diagnostics.size(), 1u);
  EXPECT_NE(summary.diagnostics[0].find("study1"), std::string::npos);
}

TEST_F(CliTmp, Preview) {
  std::mt19937_64 rng(4);
  const Dims d{16, 12, 10};
  const auto image = testkit::random_volume(rng, d);
  std::vector<std::uint8_t> bits(d.count(), 0);
  for (std::size_t k = 2; k <= 6; ++k) bits[linear_index(d, 8, 6, k)] = 1;
  const Mask3D mask(d, bits);
  EXPECT_EQ(cli::preview_slice(mask), 4u);
  EXPECT_EQ(cli::preview_slice(Mask3D::zeros(d)), 5u);

  const std::vector<double> gammas{0.7, 1.0, 1.5};
  const auto result = cli::run_preview(image, mask, gammas, dir / "p");
  ASSERT_EQ(result.images.size(), 7u);
  for (const auto& p : result.images) ASSERT_TRUE(fs::exists(p)) << p;
  const auto original = testkit::read_file(dir / "p" / "original.pgm");
  EXPECT_EQ(testkit::read_file(dir / "p" / "global_gamma_1.pgm"), original);
  EXPECT_EQ(testkit::read_file(dir / "p" / "local_gamma_1.pgm"), original);
  EXPECT_NE(testkit::read_file(dir / "p" / "global_gamma_0.7.pgm"), original);

  // Local gamma changes only the lesion pixel of the previewed slice.
  const auto local = testkit::read_file(dir / "p" / "local_gamma_1.5.pgm");
  ASSERT_EQ(local.size(), original.size());
  const std::string header = "P5\n16 12\n255\n";
  ASSERT_EQ(std::string(original.begin(), original.begin() + header.size()), header);
  for (std::size_t n = header.size(); n < local.size(); ++n) {
    const std::size_t pixel = n - header.size();
    if (pixel != 8 + 16 * 6) {
      ASSERT_EQ(local[n], original[n]) << pixel;
    }
  }
}

TEST(SampleGamma, MatchesSamplerAndFormats) {
  const auto values = cli::sample_gammas(MixtureUniform{}, 5, 42);
  GammaSampler sampler(MixtureUniform{}, 42);
  for (double v : values) EXPECT_EQ(v, sampler.sample());
  std::ostringstream out;
  cli::write_gammas(out, values);
  std::istringstream in(out.str());
  double parsed = 0.0;
  for (double v : values) {
    in >> parsed;
    EXPECT_EQ(parsed, v);
  }
}

TEST_F(CliTmp, MetricsReport) {
  const Dims d{3, 3, 3};
  auto pred = [&](const std::string& name, bool positive) {
    std::vector<double> data(d.count(), 0.0);
    if (positive) data[13] = 1.0;
    nifti::write_volume(Volume3D(d, {}, std::move(data)), dir / name);
  };
  pred("a.nii", true);
  pred("b.nii", false);
  pred("c.nii", true);
  pred("d.nii", false);
  write("m.csv",
        "study_id,prediction_path,actual_label\na,a.nii,1\nb,b.nii,1\nc,c.nii,0\nd,d.nii,0\n");
  const auto report = cli::run_metrics(dir / "m.csv", 0.5);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(report.counts.tp, 1u);
  EXPECT_EQ(report.counts.fn, 1u);
  EXPECT_EQ(report.counts.fp, 1u);
  EXPECT_EQ(report.counts.tn, 1u);
  const auto table = cli::render_metrics_table("aug", report.counts);
  EXPECT_NE(table.find("Sensitivity"), std::string::npos);
  EXPECT_NE(table.find("0.500"), std::string::npos);
  EXPECT_EQ(cli::render_metrics_csv("aug", report.counts),
            "label,n,tp,fp,tn,fn,sensitivity,specificity\naug,4,1,1,1,1,0.500000,0.500000\n");

  write("pos.csv", "study_id,prediction_path,actual_label\na,a.nii,1\nb,b.nii,1\n");
  const auto all_pos = cli::run_metrics(dir / "pos.csv", 0.5);
  EXPECT_NE(cli::render_metrics_table("aug", all_pos.counts).find("N/A"), std::string::npos);

  write("missing.csv", "study_id,prediction_path,actual_label\na,nope.nii,1\n");
  EXPECT_EQ(cli::run_metrics(dir / "missing.csv", 0.5).failures.size(), 1u);
}
